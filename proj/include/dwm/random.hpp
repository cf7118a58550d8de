#pragma once

#include <dwm/tensor.hpp>

#include <cstdint>
#include <random>

namespace dwm {

/// Standard normal variates from std::mt19937_64 via the Box-Muller transform.
///
/// Each pair of engine outputs x1, x2 gives u1 = ((x1 >> 11) + 1) * 2^-53 in (0, 1]
/// and u2 = (x2 >> 11) * 2^-53 in [0, 1); the variates are
/// sqrt(-2 ln u1) * cos(2 pi u2) followed by sqrt(-2 ln u1) * sin(2 pi u2).
/// The engine output sequence is fixed by the C++ standard, so streams are
/// reproducible for a given seed.
class NormalGenerator
{
	public:
		explicit NormalGenerator(std::uint64_t seed) :
				m_engine(seed)
		{
		}
		double next();

	private:
		std::mt19937_64 m_engine;
		bool m_has_spare = false;
		double m_spare = 0.0;
};

/// Fills a binary64 tensor of `dims` in storage order.
Tensor4<double> random_normal(const Dims4 &dims, NormalGenerator &rng);

} // namespace dwm
