#pragma once

#include <dwm/conv_spec.hpp>
#include <dwm/decompose.hpp>
#include <dwm/rational.hpp>
#include <dwm/transform.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dwm {

/*
 * Multiplication counts per input channel per filter (the normalization of the
 * published speedup table). Additions are never counted, and multiplication by
 * 0, +-2^k or +-1/2^k is free because it reduces to a shift.
 *
 * Transform costs (both Winograd variants):
 *   data transform    nsf(B_r) * l_w + nsf(B_c) * l_h   per tile
 *   kernel transform  nsf(G_r) * r_w + nsf(G_c) * l_h   once per filter/channel pair
 * where nsf(M) counts entries of M that are not shift-free. The output transform
 * is not counted. For square kernels this is 2*l*nsf(B_t) and nsf(G)*(r + l).
 */

bool is_shift_free(const Rational &x);

/// Entries of `m` that are not shift-free.
std::uint64_t count_costly_entries(const Matrix<Rational> &m);

std::uint64_t flops_direct(const ConvSpec &spec, Index2 out);

/// Element-wise products only: tiles * sum over parts of (row.count + 1) * (col.count + 1).
std::uint64_t flops_dwm_elementwise(const DecompositionPlan &plan, Index2 out);

/// Element-wise products plus transform costs of every part.
std::uint64_t flops_dwm(const DecompositionPlan &plan, Index2 out);

/// Empty for stride > 1 (not applicable).
std::optional<std::uint64_t> flops_winograd_classic(const ConvSpec &spec, const TransformSet &rows, const TransformSet &cols, Index2 out);
std::optional<std::uint64_t> flops_winograd_classic(const ConvSpec &spec, Index2 out);

struct FlopReport
{
	ConvSpec spec;
	Index2 out;
	std::uint64_t direct_mults = 0;
	std::optional<std::uint64_t> winograd_mults;
	std::uint64_t dwm_mults = 0;
	std::optional<double> speedup_winograd;
	double speedup_dwm = 0.0;
};

FlopReport flop_report(const ConvSpec &spec, Index2 out);

struct FlopConfig
{
	ConvSpec spec;
	Index2 out;
};

std::vector<FlopReport> speedup_table(const std::vector<FlopConfig> &configs);

/// Scientific notation with three significant digits, e.g. 1.76E+03.
std::string format_sci3(double value);

/// Integer counts rounded half away from zero, so 1225 prints as 1.23E+03.
std::string format_sci3(std::uint64_t value);

/// Two decimals, e.g. 2.04.
std::string format_fixed2(double value);

/// Header: kernel,stride,direct,winograd,winograd_speedup,dwm,dwm_speedup
std::string flops_csv(const std::vector<FlopReport> &reports);

} // namespace dwm
