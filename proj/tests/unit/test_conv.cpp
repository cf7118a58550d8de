#include <dwm/conv.hpp>
#include <dwm/flops.hpp>

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dwm;

namespace {

Tensor4<Rational> random_rational(Dims4 dims, unsigned seed)
{
	std::mt19937 engine(seed);
	std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
	Tensor4<Rational> t(dims);
	for (Rational &x : t.data())
		x = Rational(Rational::Integer(num(engine)), Rational::Integer(den(engine)));
	return t;
}

Tensor4<double> ones(Dims4 dims)
{
	Tensor4<double> t(dims);
	for (double &x : t.data())
		x = 1.0;
	return t;
}

}

TEST(Direct, IdentityKernel)
{
	const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 3, 5, 6 }, 1);
	Tensor4<double> g(Dims4 { 3, 3, 1, 1 });
	for (std::size_t c = 0; c < 3; c++)
		g(c, c, 0, 0) = 1.0;
	EXPECT_EQ(direct_conv2d(d, g, ConvSpec::square(1)).y, d);
}

TEST(Direct, OnesKernelCountsNeighbours)
{
	const auto y = direct_conv2d(ones(Dims4 { 1, 1, 6, 6 }), ones(Dims4 { 1, 1, 3, 3 }), ConvSpec::square(3, 1, 1)).y;
	EXPECT_EQ(y(0, 0, 0, 0), 4.0);
	EXPECT_EQ(y(0, 0, 5, 5), 4.0);
	EXPECT_EQ(y(0, 0, 0, 3), 6.0);
	EXPECT_EQ(y(0, 0, 2, 3), 9.0);
}

TEST(Direct, MatchesOracleExactly)
{
	const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 3, 8, 8 }, 2);
	const Tensor4<double> g = oracle::random_tensor(Dims4 { 4, 3, 5, 5 }, 3);
	const ConvSpec spec = ConvSpec::square(5, 2);
	const auto out = direct_conv2d(d, g, spec);
	EXPECT_EQ(out.y, oracle::oracle_conv(d, g, spec));
	EXPECT_EQ(out.flops, 2u * 4 * 3 * 2 * 2 * 25);
}

TEST(Direct, ShapeErrors)
{
	const Tensor4<double> d(Dims4 { 1, 2, 6, 6 });
	EXPECT_THROW(direct_conv2d(d, Tensor4<double>(Dims4 { 1, 3, 3, 3 }), ConvSpec::square(3)), ShapeError);
	EXPECT_THROW(direct_conv2d(d, Tensor4<double>(Dims4 { 1, 2, 7, 7 }), ConvSpec::square(7)), ShapeError);
}

TEST(Direct, NonFiniteIsAnError)
{
	Tensor4<float> d(Dims4 { 1, 1, 3, 3 });
	d(0, 0, 1, 1) = std::numeric_limits<float>::infinity();
	Tensor4<float> g(Dims4 { 1, 1, 3, 3 });
	EXPECT_THROW(direct_conv2d(d, g, ConvSpec::square(3)), NonFiniteError);
}

TEST(Winograd, OneDimensionalExamples)
{
	Tensor4<Rational> d(Dims4 { 1, 1, 1, 4 });
	for (int i = 0; i < 4; i++)
		d(0, 0, 0, i) = Rational(i + 1);
	Tensor4<Rational> g(Dims4 { 1, 1, 1, 3 });
	for (int i = 0; i < 3; i++)
		g(0, 0, 0, i) = Rational(1);
	const ConvSpec spec { { 1, 3 }, { 1, 1 }, { } };
	const auto y = winograd_conv2d(d, g, spec).y;
	EXPECT_EQ(y(0, 0, 0, 0), Rational(6));
	EXPECT_EQ(y(0, 0, 0, 1), Rational(9));

	Tensor4<Rational> delta(Dims4 { 1, 1, 1, 3 });
	delta(0, 0, 0, 0) = Rational(1);
	const auto z = winograd_conv2d(d, delta, spec).y;
	EXPECT_EQ(z(0, 0, 0, 0), Rational(1));
	EXPECT_EQ(z(0, 0, 0, 1), Rational(2));
}

TEST(Winograd, SingleTile)
{
	const Tensor4<Rational> dr = random_rational(Dims4 { 1, 1, 4, 4 }, 5);
	const Tensor4<Rational> gr = random_rational(Dims4 { 1, 1, 3, 3 }, 6);
	EXPECT_EQ(winograd_conv2d(dr, gr, ConvSpec::square(3)).y, direct_conv2d(dr, gr, ConvSpec::square(3)).y);

	const Tensor4<double> d = oracle::random_tensor(Dims4 { 1, 1, 4, 4 }, 5);
	const Tensor4<double> g = oracle::random_tensor(Dims4 { 1, 1, 3, 3 }, 6);
	EXPECT_LE(max_abs_diff(winograd_conv2d(d, g, ConvSpec::square(3)).y, oracle::oracle_conv(d, g, ConvSpec::square(3))), 1e-13);
}

TEST(Winograd, RejectsStride)
{
	const Tensor4<double> d(Dims4 { 1, 1, 8, 8 });
	const Tensor4<double> g(Dims4 { 1, 1, 3, 3 });
	try
	{
		winograd_conv2d(d, g, ConvSpec::square(3, 2));
		FAIL() << "expected an error";
	} catch (const std::invalid_argument &e)
	{
		EXPECT_NE(std::string(e.what()).find("dwm"), std::string::npos);
	}
}

TEST(Winograd, OddOutputAndRectangularKernels)
{
	for (Index2 kernel : { Index2 { 3, 3 }, Index2 { 5, 3 }, Index2 { 1, 7 }, Index2 { 4, 2 } })
	{
		const ConvSpec spec { kernel, { 1, 1 }, { 1, 0, 2, 1 } };
		const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 3, 11, 10 }, 7);
		const Tensor4<double> g = oracle::random_tensor(Dims4 { 2, 3, kernel.row, kernel.col }, 8);
		EXPECT_LE(max_abs_diff(winograd_conv2d(d, g, spec).y, oracle::oracle_conv(d, g, spec)), 1e-10) << kernel.row << "x" << kernel.col;
	}
}

TEST(Dwm, MatchesOracleAcrossKernelsAndStrides)
{
	unsigned seed = 100;
	for (std::size_t r = 1; r <= 11; r++)
		for (std::size_t s = 1; s <= 3; s++)
		{
			const ConvSpec spec = ConvSpec::square(r, s, (r - 1) / 2);
			const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 3, 15 + r % 4, 16 }, seed++);
			const Tensor4<double> g = oracle::random_tensor(Dims4 { 2, 3, r, r }, seed++);
			const auto out = dwm_conv2d(d, g, spec, plan_decomposition(spec));
			EXPECT_LE(max_abs_diff(out.y, oracle::oracle_conv(d, g, spec)), 1e-10) << "r=" << r << " s=" << s;
		}
}

TEST(Dwm, FiveByFiveExamples)
{
	const ConvSpec s1 = ConvSpec::square(5);
	const Tensor4<double> d = oracle::random_tensor(Dims4 { 1, 1, 18, 18 }, 9);
	const Tensor4<double> g = oracle::random_tensor(Dims4 { 1, 1, 5, 5 }, 10);
	EXPECT_LE(max_abs_diff(dwm_conv2d(d, g, s1, plan_decomposition(s1)).y, direct_conv2d(d, g, s1).y), 1e-12);

	const ConvSpec s2 = ConvSpec::square(5, 2);
	const Tensor4<double> d7 = oracle::random_tensor(Dims4 { 1, 1, 7, 7 }, 11);
	const auto y = dwm_conv2d(d7, g, s2, plan_decomposition(s2)).y;
	EXPECT_EQ(y.dims(), (Dims4 { 1, 1, 2, 2 }));
	EXPECT_LE(max_abs_diff(y, direct_conv2d(d7, g, s2).y), 1e-12);
}

TEST(Dwm, ExactInRationalArithmetic)
{
	for (auto [r, s] : { std::pair<std::size_t, std::size_t> { 5, 1 }, { 5, 2 }, { 7, 2 }, { 4, 3 } })
	{
		const ConvSpec spec = ConvSpec::square(r, s, 1);
		const Tensor4<Rational> d = random_rational(Dims4 { 1, 2, 9, 10 }, 20);
		const Tensor4<Rational> g = random_rational(Dims4 { 2, 2, r, r }, 21);
		EXPECT_EQ(dwm_conv2d(d, g, spec, plan_decomposition(spec)).y, direct_conv2d(d, g, spec).y) << "r=" << r << " s=" << s;
	}
}

TEST(Dwm, LinearInRationalArithmetic)
{
	const ConvSpec spec = ConvSpec::square(5, 2, 2);
	const DecompositionPlan plan = plan_decomposition(spec);
	const Tensor4<Rational> d1 = random_rational(Dims4 { 1, 2, 8, 8 }, 30);
	const Tensor4<Rational> d2 = random_rational(Dims4 { 1, 2, 8, 8 }, 31);
	const Tensor4<Rational> g = random_rational(Dims4 { 2, 2, 5, 5 }, 32);
	const Rational alpha = Rational::parse("3/7"), beta = Rational::parse("-5/2");

	Tensor4<Rational> mix(d1.dims());
	for (std::size_t i = 0; i < mix.size(); i++)
		mix.data()[i] = alpha * d1.data()[i] + beta * d2.data()[i];
	const auto y1 = dwm_conv2d(d1, g, spec, plan).y;
	const auto y2 = dwm_conv2d(d2, g, spec, plan).y;
	const auto ym = dwm_conv2d(mix, g, spec, plan).y;
	for (std::size_t i = 0; i < ym.size(); i++)
		EXPECT_EQ(ym.data()[i], alpha * y1.data()[i] + beta * y2.data()[i]);
}

TEST(Dwm, DegenerateCaseIsBitIdenticalToWinograd)
{
	const ConvSpec spec = ConvSpec::square(3, 1, 1);
	const DecompositionPlan plan = plan_decomposition(spec);
	const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 4, 14, 14 }, 40);
	const Tensor4<double> g = oracle::random_tensor(Dims4 { 3, 4, 3, 3 }, 41);
	EXPECT_EQ(dwm_conv2d(d, g, spec, plan).y, winograd_conv2d(d, g, spec).y);
	const auto df = tensor_cast<float>(d);
	const auto gf = tensor_cast<float>(g);
	EXPECT_EQ(dwm_conv2d(df, gf, spec, plan).y, winograd_conv2d(df, gf, spec).y);
}

TEST(Dwm, InstrumentedCountsMatchModel)
{
	for (std::size_t r : { 3, 5, 7, 9, 11 })
		for (std::size_t s : { 1, 2 })
		{
			const ConvSpec spec = ConvSpec::square(r, s, (r - 1) / 2);
			const std::size_t in = 14 * s;
			const Index2 out = spec.output_extent(in, in);
			const Tensor4<double> d = oracle::random_tensor(Dims4 { 1, 1, in, in }, 50);
			const Tensor4<double> g = oracle::random_tensor(Dims4 { 1, 1, r, r }, 51);
			const DecompositionPlan plan = plan_decomposition(spec);
			EXPECT_EQ(dwm_conv2d(d, g, spec, plan).flops, flops_dwm_elementwise(plan, out)) << r << " s" << s;
			if (s == 1)
			{
				const auto l = static_cast<std::uint64_t>(r + 1);
				EXPECT_EQ(winograd_conv2d(d, g, spec).flops, ((out.row + 1) / 2) * ((out.col + 1) / 2) * l * l);
			}
		}
	const ConvSpec spec = ConvSpec::square(5, 2, 2);
	const Tensor4<double> d = oracle::random_tensor(Dims4 { 2, 3, 14, 14 }, 52);
	const Tensor4<double> g = oracle::random_tensor(Dims4 { 4, 3, 5, 5 }, 53);
	const DecompositionPlan plan = plan_decomposition(spec);
	EXPECT_EQ(dwm_conv2d(d, g, spec, plan).flops, 2u * 4 * 3 * flops_dwm_elementwise(plan, spec.output_extent(14, 14)));
}

TEST(Dwm, PlanMismatchRejected)
{
	const Tensor4<double> d(Dims4 { 1, 1, 10, 10 });
	const Tensor4<double> g(Dims4 { 1, 1, 5, 5 });
	EXPECT_THROW(dwm_conv2d(d, g, ConvSpec::square(5), plan_decomposition(ConvSpec::square(5, 2))), std::invalid_argument);
}
