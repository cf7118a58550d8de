#include <dwm/decompose.hpp>

#include <algorithm>
#include <stdexcept>

namespace dwm {

std::vector<std::size_t> split_by_size(std::size_t taps)
{
	if (taps == 0)
		throw std::invalid_argument("split_by_size: taps must be positive");
	std::vector<std::size_t> blocks(taps / 3, 3);
	if (taps % 3 != 0)
		blocks.push_back(taps % 3);
	return blocks;
}

std::vector<AxisPart> split_axis_by_stride(std::size_t taps, std::size_t stride)
{
	if (stride == 0)
		throw std::invalid_argument("split_axis_by_stride: stride must be positive");
	std::vector<AxisPart> result;
	for (std::size_t residue = 0; residue < stride && residue < taps; residue++)
		result.push_back(AxisPart { residue, stride, (taps - residue + stride - 1) / stride });
	return result;
}

std::vector<AxisPart> plan_axis(std::size_t taps, std::size_t stride)
{
	std::vector<AxisPart> result;
	for (const AxisPart &residue : split_axis_by_stride(taps, stride))
	{
		std::size_t offset = 0;
		for (std::size_t block : split_by_size(residue.count))
		{
			result.push_back(AxisPart { residue.origin + residue.step * offset, residue.step, block });
			offset += block;
		}
	}
	return result;
}

DecompositionPlan plan_decomposition(const ConvSpec &spec)
{
	if (spec.kernel.row == 0 || spec.kernel.col == 0 || spec.stride.row == 0 || spec.stride.col == 0)
		throw std::invalid_argument("plan_decomposition: kernel and stride must be positive");
	DecompositionPlan plan;
	plan.spec = spec;
	plan.row_parts = plan_axis(spec.kernel.row, spec.stride.row);
	plan.col_parts = plan_axis(spec.kernel.col, spec.stride.col);
	for (const AxisPart &row : plan.row_parts)
		for (const AxisPart &col : plan.col_parts)
			plan.parts.push_back(
					KernelPart { row, col, transform_for(2, static_cast<int>(row.count)), transform_for(2, static_cast<int>(col.count)) });
	return plan;
}

SliceRegion input_region_for_part(const DecompositionPlan &plan, const KernelPart &part, Index2 out)
{
	if (std::find(plan.parts.begin(), plan.parts.end(), part) == plan.parts.end())
		throw std::invalid_argument("input_region_for_part: part does not belong to the plan");
	if (out.row == 0 || out.col == 0)
		throw std::invalid_argument("input_region_for_part: empty output");
	return SliceRegion { Index2 { part.row.origin, part.col.origin }, Index2 { part.row.step, part.col.step }, Index2 { out.row - 1 + part.row.count,
			out.col - 1 + part.col.count } };
}

} // namespace dwm
