#include <dwm/random.hpp>

#include <cmath>
#include <numbers>

namespace dwm {

double NormalGenerator::next()
{
	if (m_has_spare)
	{
		m_has_spare = false;
		return m_spare;
	}
	constexpr double scale = 0x1.0p-53;
	const double u1 = static_cast<double>((m_engine() >> 11) + 1) * scale;
	const double u2 = static_cast<double>(m_engine() >> 11) * scale;
	const double radius = std::sqrt(-2.0 * std::log(u1));
	const double angle = 2.0 * std::numbers::pi * u2;
	m_spare = radius * std::sin(angle);
	m_has_spare = true;
	return radius * std::cos(angle);
}

Tensor4<double> random_normal(const Dims4 &dims, NormalGenerator &rng)
{
	Tensor4<double> result(dims);
	for (double &x : result.data())
		x = rng.next();
	return result;
}

} // namespace dwm
