#include <dwm/flops.hpp>

#include <cstdio>
#include <sstream>

namespace dwm {

namespace {

std::uint64_t tiles(Index2 out)
{
	return static_cast<std::uint64_t>((out.row + 1) / 2) * ((out.col + 1) / 2);
}

struct TransformCost
{
	std::uint64_t per_tile = 0;
	std::uint64_t per_kernel = 0;
};

/// Cost of B_r d B_c^T (per tile) and G_r g G_c^T (per filter/channel pair).
TransformCost transform_cost(const TransformSet &rows, const TransformSet &cols)
{
	const std::uint64_t lh = rows.l();
	const std::uint64_t lw = cols.l();
	TransformCost cost;
	cost.per_tile = count_costly_entries(rows.B_t) * lw + count_costly_entries(cols.B_t) * lh;
	cost.per_kernel = count_costly_entries(rows.G) * static_cast<std::uint64_t>(cols.r) + count_costly_entries(cols.G) * lh;
	return cost;
}

std::string kernel_label(const ConvSpec &spec)
{
	return std::to_string(spec.kernel.row) + "x" + std::to_string(spec.kernel.col);
}

std::string stride_label(const ConvSpec &spec)
{
	if (spec.stride.row == spec.stride.col)
		return std::to_string(spec.stride.row);
	return std::to_string(spec.stride.row) + "x" + std::to_string(spec.stride.col);
}

}

bool is_shift_free(const Rational &x)
{
	return x.is_power_of_two_or_zero();
}

std::uint64_t count_costly_entries(const Matrix<Rational> &m)
{
	std::uint64_t count = 0;
	for (const Rational &x : m.data())
		if (!is_shift_free(x))
			count++;
	return count;
}

std::uint64_t flops_direct(const ConvSpec &spec, Index2 out)
{
	return static_cast<std::uint64_t>(out.row) * out.col * spec.kernel.row * spec.kernel.col;
}

std::uint64_t flops_dwm_elementwise(const DecompositionPlan &plan, Index2 out)
{
	std::uint64_t per_tile = 0;
	for (const KernelPart &part : plan.parts)
		per_tile += (part.row.count + 1) * (part.col.count + 1);
	return tiles(out) * per_tile;
}

std::uint64_t flops_dwm(const DecompositionPlan &plan, Index2 out)
{
	std::uint64_t total = flops_dwm_elementwise(plan, out);
	for (const KernelPart &part : plan.parts)
	{
		const TransformCost cost = transform_cost(*part.transform_rows, *part.transform_cols);
		total += tiles(out) * cost.per_tile + cost.per_kernel;
	}
	return total;
}

std::optional<std::uint64_t> flops_winograd_classic(const ConvSpec &spec, const TransformSet &rows, const TransformSet &cols, Index2 out)
{
	if (spec.stride.row != 1 || spec.stride.col != 1)
		return std::nullopt;
	const TransformCost cost = transform_cost(rows, cols);
	const std::uint64_t elementwise = tiles(out) * static_cast<std::uint64_t>(rows.l()) * cols.l();
	return elementwise + tiles(out) * cost.per_tile + cost.per_kernel;
}

std::optional<std::uint64_t> flops_winograd_classic(const ConvSpec &spec, Index2 out)
{
	if (spec.stride.row != 1 || spec.stride.col != 1)
		return std::nullopt;
	return flops_winograd_classic(spec, *transform_for(2, static_cast<int>(spec.kernel.row)), *transform_for(2, static_cast<int>(spec.kernel.col)),
			out);
}

FlopReport flop_report(const ConvSpec &spec, Index2 out)
{
	FlopReport report;
	report.spec = spec;
	report.out = out;
	report.direct_mults = flops_direct(spec, out);
	report.winograd_mults = flops_winograd_classic(spec, out);
	report.dwm_mults = flops_dwm(plan_decomposition(spec), out);
	const double direct = static_cast<double>(report.direct_mults);
	if (report.winograd_mults)
		report.speedup_winograd = direct / static_cast<double>(*report.winograd_mults);
	report.speedup_dwm = direct / static_cast<double>(report.dwm_mults);
	return report;
}

std::vector<FlopReport> speedup_table(const std::vector<FlopConfig> &configs)
{
	std::vector<FlopReport> result;
	result.reserve(configs.size());
	for (const FlopConfig &config : configs)
		result.push_back(flop_report(config.spec, config.out));
	return result;
}

std::string format_sci3(double value)
{
	char buffer[32];
	std::snprintf(buffer, sizeof(buffer), "%.2E", value);
	return buffer;
}

std::string format_sci3(std::uint64_t value)
{
	int exponent = 0;
	for (std::uint64_t v = value; v >= 10; v /= 10)
		exponent++;
	std::uint64_t mantissa = value;
	if (exponent >= 2)
	{
		std::uint64_t scale = 1;
		for (int i = 0; i < exponent - 2; i++)
			scale *= 10;
		mantissa = value / scale + (value % scale >= (scale + 1) / 2 && scale > 1 ? 1 : 0);
		if (mantissa == 1000)
		{
			mantissa = 100;
			exponent++;
		}
	}
	else
		for (int i = exponent; i < 2; i++)
			mantissa *= 10;
	char buffer[32];
	std::snprintf(buffer, sizeof(buffer), "%d.%02dE+%02d", static_cast<int>(mantissa / 100), static_cast<int>(mantissa % 100), exponent);
	return buffer;
}

std::string format_fixed2(double value)
{
	char buffer[32];
	std::snprintf(buffer, sizeof(buffer), "%.2f", value);
	return buffer;
}

std::string flops_csv(const std::vector<FlopReport> &reports)
{
	std::ostringstream csv;
	csv << "kernel,stride,direct,winograd,winograd_speedup,dwm,dwm_speedup\n";
	for (const FlopReport &r : reports)
	{
		csv << kernel_label(r.spec) << ',' << stride_label(r.spec) << ',' << format_sci3(r.direct_mults) << ',';
		if (r.winograd_mults)
			csv << format_sci3(*r.winograd_mults) << ',' << format_fixed2(*r.speedup_winograd) << ',';
		else
			csv << "N/A,N/A,";
		csv << format_sci3(r.dwm_mults) << ',' << format_fixed2(r.speedup_dwm) << '\n';
	}
	return csv.str();
}

} // namespace dwm
