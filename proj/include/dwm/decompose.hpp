#pragma once

#include <dwm/conv_spec.hpp>
#include <dwm/transform.hpp>

#include <cstddef>
#include <memory>
#include <vector>

namespace dwm {

/// Taps origin, origin + step, ..., origin + step*(count-1) of one kernel axis.
struct AxisPart
{
	std::size_t origin = 0;
	std::size_t step = 1;
	std::size_t count = 1; ///< 1, 2 or 3

	bool operator==(const AxisPart &) const = default;
};

struct KernelPart
{
	AxisPart row;
	AxisPart col;
	std::shared_ptr<const TransformSet> transform_rows; ///< F(2, row.count)
	std::shared_ptr<const TransformSet> transform_cols; ///< F(2, col.count)

	std::size_t taps() const noexcept
	{
		return row.count * col.count;
	}
	bool operator==(const KernelPart &other) const
	{
		return row == other.row && col == other.col;
	}
};

/// Partition of an r_h x r_w kernel into stride-1 parts of at most 3x3 taps.
/// Parts are ordered row-major over (row part, col part); aggregation follows this order.
struct DecompositionPlan
{
	ConvSpec spec;
	std::vector<AxisPart> row_parts;
	std::vector<AxisPart> col_parts;
	std::vector<KernelPart> parts;
};

/// Greedy blocks of 3 followed by the remainder, low-order first: 7 -> [3, 3, 1].
std::vector<std::size_t> split_by_size(std::size_t taps);

/// One (origin = c, step = s, taps) entry per non-empty residue c of the tap index modulo s.
std::vector<AxisPart> split_axis_by_stride(std::size_t taps, std::size_t stride);

/// Stride split then size split of one axis.
std::vector<AxisPart> plan_axis(std::size_t taps, std::size_t stride);

DecompositionPlan plan_decomposition(const ConvSpec &spec);

struct SliceRegion
{
	Index2 origin;
	Index2 step;
	Index2 count;
};

/// Samples of the padded input consumed by `part` for an output of `out` extent:
/// origin = part origin, step = stride, count = out - 1 + taps per axis.
SliceRegion input_region_for_part(const DecompositionPlan &plan, const KernelPart &part, Index2 out);

} // namespace dwm
