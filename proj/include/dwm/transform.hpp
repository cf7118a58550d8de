#pragma once

#include <dwm/matrix.hpp>
#include <dwm/rational.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <type_traits>
#include <string>
#include <vector>

namespace dwm {

/// Exact transform triple for F(m, r): y = A_t * ((G * g) .* (B_t * d)).
///
/// Rows of G and B_t (and columns of A_t) follow the order of `points`,
/// with the row for the point at infinity last.
struct TransformSet
{
	int m = 0;
	int r = 0;
	std::vector<Rational> points;
	Matrix<Rational> G;   ///< l x r
	Matrix<Rational> B_t; ///< l x l
	Matrix<Rational> A_t; ///< m x l

	int l() const noexcept
	{
		return m + r - 1;
	}
	bool operator==(const TransformSet &) const = default;
};

/// Same triple with entries rounded to T.
template<typename T>
struct NumericTransform
{
	int m = 0;
	int r = 0;
	Matrix<T> G;
	Matrix<T> B_t;
	Matrix<T> A_t;

	int l() const noexcept
	{
		return m + r - 1;
	}
};

/// Prefix of 0, 1, -1, 2, -2, 1/2, -1/2, 3, -3, 1/3, -1/3, 4, -4.
std::vector<Rational> default_points(int count);

/// Cook-Toom construction of F(m, r) from m + r - 2 distinct finite points
/// (the infinity node is implicit and always last).
///
/// Each finite row i uses the Lagrange basis numerator prod_{j != i}(x - p_j) in B_t
/// and folds 1 / prod_{j != i}(p_i - p_j) into G. Two sign normalizations are
/// applied: the first point's row is negated when its denominator is negative,
/// and the infinity row of B_t is negated (together with the last column of A_t)
/// when its lowest-order nonzero coefficient is negative.
///
/// r == 1 with no points yields identity pass-through transforms.
TransformSet cook_toom(int m, int r, const std::vector<Rational> &points);

struct Counterexample
{
	std::vector<Rational> g;
	std::vector<Rational> d;
	std::vector<Rational> expected;
	std::vector<Rational> actual;
};

struct VerifyResult
{
	bool passed = true;
	int trials_run = 0;
	std::optional<Counterexample> counterexample;
};

/// Exact check of the transform identity on `trials` pseudo-random rational (g, d) pairs.
/// Never throws on mismatch; the first counterexample is reported.
VerifyResult verify_transform(const TransformSet &ts, int trials, std::uint64_t seed = 0x5eed);

/// Applies the transform to one (g, d) pair in exact arithmetic.
std::vector<Rational> apply_transform(const TransformSet &ts, const std::vector<Rational> &g, const std::vector<Rational> &d);

template<typename T>
Matrix<T> convert_matrix(const Matrix<Rational> &m)
{
	Matrix<T> result(m.rows(), m.cols());
	for (std::size_t i = 0; i < m.rows(); i++)
		for (std::size_t j = 0; j < m.cols(); j++)
		{
			if constexpr (std::is_same_v<T, Rational>)
				result(i, j) = m(i, j);
			else
				result(i, j) = static_cast<T>(m(i, j));
		}
	return result;
}

/// Rounds every entry to the nearest T (identity for T = Rational).
template<typename T>
NumericTransform<T> to_float(const TransformSet &ts)
{
	return NumericTransform<T> { ts.m, ts.r, convert_matrix<T>(ts.G), convert_matrix<T>(ts.B_t), convert_matrix<T>(ts.A_t) };
}

/// Cached F(m, r) built from default_points(m + r - 2). Thread-safe.
std::shared_ptr<const TransformSet> transform_for(int m, int r);

/// Cached numeric version of transform_for(m, r).
template<typename T>
std::shared_ptr<const NumericTransform<T>> numeric_transform_for(int m, int r);

} // namespace dwm
