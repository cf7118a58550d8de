#include <dwm/bench.hpp>
#include <dwm/random.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace dwm;
using nlohmann::json;

namespace {

AccuracyConfig small_config(std::size_t kernel, std::size_t stride = 1)
{
	AccuracyConfig c;
	c.kernel = kernel;
	c.stride = stride;
	c.hw = 10;
	c.channels = 4;
	c.filters = 3;
	c.precisions = { Precision::binary32, Precision::binary64 };
	c.seeds = { 1, 2 };
	return c;
}

std::string config_error(const json &doc)
{
	try
	{
		parse_bench_config(doc);
	} catch (const ConfigError &e)
	{
		return e.what();
	}
	return "";
}

json load(const std::string &relative)
{
	std::ifstream stream(std::string(DWM_SOURCE_DIR) + "/" + relative);
	return json::parse(stream);
}

}

TEST(Random, BoxMullerStream)
{
	std::mt19937_64 engine(42);
	NormalGenerator rng(42);
	for (int pair = 0; pair < 4; pair++)
	{
		const double u1 = static_cast<double>((engine() >> 11) + 1) / 9007199254740992.0;
		const double u2 = static_cast<double>(engine() >> 11) / 9007199254740992.0;
		const double radius = std::sqrt(-2.0 * std::log(u1));
		EXPECT_EQ(rng.next(), radius * std::cos(2.0 * std::numbers::pi * u2));
		EXPECT_EQ(rng.next(), radius * std::sin(2.0 * std::numbers::pi * u2));
	}
}

TEST(Random, Moments)
{
	NormalGenerator rng(7);
	const Tensor4<double> t = random_normal(Dims4 { 1, 1, 200, 200 }, rng);
	double mean = 0.0, var = 0.0;
	for (double x : t.data())
		mean += x;
	mean /= static_cast<double>(t.size());
	for (double x : t.data())
		var += (x - mean) * (x - mean);
	var /= static_cast<double>(t.size());
	EXPECT_NEAR(mean, 0.0, 0.02);
	EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(Accuracy, RowsAndSanity)
{
	const AccuracyReport report = run_accuracy_suite( { small_config(5), small_config(3, 2) });
	// stride 1: 3 algorithms x 2 precisions x 2 seeds; stride 2 drops classic Winograd
	ASSERT_EQ(report.rows.size(), 12u + 8u);
	for (const AccuracyRow &row : report.rows)
	{
		ASSERT_TRUE(row.mse.has_value());
		EXPECT_GE(*row.mse, 0.0);
		if (row.algorithm == Algorithm::direct && row.precision == Precision::binary64)
		{
			EXPECT_EQ(*row.mse, 0.0);
			EXPECT_FALSE(row.log_scaled().has_value());
		}
		if (row.precision == Precision::binary64)
			EXPECT_LE(*row.mse, 1e-20);
		if (row.precision == Precision::binary32)
			EXPECT_NEAR(*row.log_scaled(), std::log10(*row.mse) + 10.0, 1e-12);
		if (row.stride == 2)
			EXPECT_NE(row.algorithm, Algorithm::winograd);
	}
	EXPECT_EQ(report.rows.front().config_index, 0u);
	EXPECT_EQ(report.rows.back().config_index, 1u);
}

TEST(Accuracy, Deterministic)
{
	const std::vector<AccuracyConfig> configs { small_config(7) };
	EXPECT_EQ(accuracy_csv(run_accuracy_suite(configs)), accuracy_csv(run_accuracy_suite(configs)));
	const AccuracyReport a = run_accuracy_suite(configs, { 9 });
	ASSERT_FALSE(a.rows.empty());
	for (const auto &row : a.rows)
		EXPECT_EQ(row.seed, 9u);
}

TEST(Accuracy, CsvAndJson)
{
	AccuracyReport report;
	report.rows.push_back( { 0, 5, 1, 14, 8, 8, Algorithm::dwm, Precision::binary32, 3, 1.5e-9 });
	report.rows.push_back( { 0, 5, 1, 14, 8, 8, Algorithm::winograd, Precision::binary32, 3, std::nullopt });
	EXPECT_EQ(accuracy_csv(report), "kernel,stride,hw,channels,filters,algorithm,precision,seed,mse,log_scaled,status\n"
			"5x5,1,14,8,8,dwm,f32,3,1.500E-09,1.176,ok\n"
			"5x5,1,14,8,8,winograd,f32,3,NaN,,overflow\n");
	const json doc = accuracy_json(report);
	EXPECT_EQ(doc["rows"].size(), 2u);
	EXPECT_TRUE(doc["rows"][1]["mse"].is_null());
	EXPECT_EQ(doc["rows"][1]["status"], "overflow");
	EXPECT_EQ(accuracy_csv( { }), "kernel,stride,hw,channels,filters,algorithm,precision,seed,mse,log_scaled,status\n");
}

TEST(Accuracy, BandChecks)
{
	auto row = [](std::size_t kernel, Algorithm a, Precision p, std::optional<double> mse)
	{
		return AccuracyRow { kernel / 2, kernel, 1, 14, 8, 8, a, p, 1, mse };
	};
	AccuracyReport good;
	good.rows = { row(3, Algorithm::direct, Precision::binary32, 1e-10), row(3, Algorithm::winograd, Precision::binary32, 1e-9), row(3, Algorithm::dwm,
			Precision::binary32, 1e-9), row(7, Algorithm::direct, Precision::binary32, 1e-9), row(7, Algorithm::winograd, Precision::binary32, 1e-3), row(7,
			Algorithm::dwm, Precision::binary32, 2e-9), row(9, Algorithm::winograd, Precision::binary32, std::nullopt) };
	for (const auto &c : check_accuracy_bands(good))
		EXPECT_TRUE(c.passed) << c.name << " " << c.detail;

	AccuracyReport bad = good;
	bad.rows[4].mse = 1e-6;
	bad.rows[5].mse = 1e-6;
	std::size_t failures = 0;
	for (const auto &c : check_accuracy_bands(bad))
		failures += c.passed ? 0 : 1;
	// winograd floor, dwm ceiling, dwm vs direct, and the kernel sweep stays monotone
	EXPECT_EQ(failures, 3u);

	AccuracyReport non_monotone = good;
	non_monotone.rows[1].mse = 1e-2;
	bool sweep_failed = false;
	for (const auto &c : check_accuracy_bands(non_monotone))
		if (c.name.find("non-decreasing") != std::string::npos)
			sweep_failed = !c.passed;
	EXPECT_TRUE(sweep_failed);
}

TEST(Config, ParseAccuracy)
{
	const BenchConfig c = parse_bench_config(json::parse(R"({"schema":1,"suite":"accuracy","configs":[
		{"kernel":5,"stride":2,"hw":14,"channels":8,"filters":4,"precisions":["f32"],"seeds":[4,5]}]})"));
	EXPECT_EQ(c.suite, "accuracy");
	ASSERT_EQ(c.accuracy.size(), 1u);
	EXPECT_EQ(c.accuracy[0].kernel, 5u);
	EXPECT_EQ(c.accuracy[0].stride, 2u);
	EXPECT_EQ(c.accuracy[0].precisions, std::vector<Precision> { Precision::binary32 });
	EXPECT_EQ(c.accuracy[0].seeds, (std::vector<std::uint64_t> { 4, 5 }));
	const ConvSpec spec = c.accuracy[0].spec();
	EXPECT_EQ(spec.pad, (Padding { 2, 2, 2, 2 }));
	AccuracyConfig even;
	even.kernel = 4;
	EXPECT_EQ(even.spec().pad, (Padding { 1, 2, 1, 2 }));
}

TEST(Config, ParseFlops)
{
	const BenchConfig c = parse_bench_config(json::parse(R"({"schema":1,"suite":"flops","configs":[
		{"kernel":[5,3],"stride":2,"out":[14,12],"reference":{"direct":1,"winograd_speedup":"N/A"}},{"kernel":3,"hw":7}]})"));
	ASSERT_EQ(c.flops.size(), 2u);
	EXPECT_EQ(c.flops[0].config.spec.kernel, (Index2 { 5, 3 }));
	EXPECT_EQ(c.flops[0].config.out, (Index2 { 14, 12 }));
	EXPECT_TRUE(c.flops[0].reference->winograd_na);
	EXPECT_EQ(c.flops[1].config.out, (Index2 { 7, 7 }));
	EXPECT_FALSE(c.flops[1].reference.has_value());

	const BenchConfig empty = parse_bench_config(json::parse(R"({"schema":1,"suite":"flops","configs":[]})"));
	EXPECT_TRUE(run_flops_suite(empty.flops).empty());
}

TEST(Config, ErrorsNameTheEntry)
{
	EXPECT_NE(config_error(json::parse(R"({"suite":"flops","configs":[]})")).find("schema"), std::string::npos);
	EXPECT_NE(config_error(json::parse(R"({"schema":1,"suite":"speed","configs":[]})")).find("suite"), std::string::npos);
	const std::string e = config_error(json::parse(R"({"schema":1,"suite":"flops","configs":[{"kernel":3,"out":14},{"kernel":0,"out":14}]})"));
	EXPECT_NE(e.find("configs[1]"), std::string::npos) << e;
	EXPECT_NE(e.find("kernel"), std::string::npos) << e;
	const std::string m = config_error(json::parse(R"({"schema":1,"suite":"accuracy","configs":[{"kernel":3,"hw":14,"channels":2}]})"));
	EXPECT_NE(m.find("configs[0]"), std::string::npos) << m;
	EXPECT_NE(m.find("filters"), std::string::npos) << m;
	const std::string p = config_error(json::parse(
			R"({"schema":1,"suite":"accuracy","configs":[{"kernel":3,"hw":14,"channels":2,"filters":2,"precisions":["f16"]}]})"));
	EXPECT_NE(p.find("configs[0]"), std::string::npos) << p;
}

TEST(FlopSuite, BundledReferenceConfig)
{
	const BenchConfig c = parse_bench_config(load("configs/table3.json"));
	ASSERT_EQ(c.flops.size(), 10u);
	const auto reports = run_flops_suite(c.flops);
	const auto checks = check_flop_references(c.flops, reports);
	EXPECT_FALSE(checks.empty());
	for (const auto &check : checks)
		EXPECT_TRUE(check.passed) << check.name << " " << check.detail;
	const json doc = flops_json(c.flops, reports);
	EXPECT_EQ(doc["rows"][1]["published_winograd"], "1.48E+04");
	EXPECT_EQ(doc["rows"][1]["winograd"], 3160);
	EXPECT_TRUE(doc["rows"][5]["winograd"].is_null());
}

TEST(FlopSuite, ReferenceMismatchIsReported)
{
	std::vector<FlopSuiteEntry> entries { { { ConvSpec::square(3), { 14, 14 } }, FlopReference { 1764, 785, "2.25", "N/A" } } };
	const auto checks = check_flop_references(entries, run_flops_suite(entries));
	std::size_t failed = 0;
	for (const auto &c : checks)
		failed += c.passed ? 0 : 1;
	EXPECT_EQ(failed, 2u);
}

TEST(Network, SingleLayerMatchesTableRow)
{
	const NetworkSpec net = parse_network(json::parse(R"({"schema":1,"name":"one","layers":[
		{"name":"c","in_channels":1,"out_channels":1,"kernel":3,"stride":1,"pad":1,"input":14}]})"));
	const NetworkReport r = analyze_network(net);
	EXPECT_EQ(r.total_direct, 1764u);
	EXPECT_EQ(r.total_dwm, 784u);
	EXPECT_EQ(r.total_winograd, 784u);
}

TEST(Network, TotalsAreSums)
{
	const NetworkSpec net = parse_network(json::parse(R"({"schema":1,"name":"two","layers":[
		{"name":"a","in_channels":3,"out_channels":8,"kernel":5,"stride":2,"pad":2,"input":28},
		{"name":"b","in_channels":8,"out_channels":16,"kernel":1,"input":14}]})"));
	const NetworkReport r = analyze_network(net);
	ASSERT_EQ(r.layers.size(), 2u);
	EXPECT_EQ(r.layers[0].direct, 3u * 8 * 14 * 14 * 25);
	EXPECT_EQ(r.layers[0].dwm, 3u * 8 * 2401);
	EXPECT_FALSE(r.layers[0].winograd.has_value());
	EXPECT_FALSE(r.layers[1].accelerated);
	EXPECT_EQ(r.layers[1].dwm, r.layers[1].direct);
	EXPECT_EQ(r.total_direct, r.layers[0].direct + r.layers[1].direct);
	EXPECT_EQ(r.total_dwm, r.layers[0].dwm + r.layers[1].dwm);
	EXPECT_EQ(r.total_winograd, r.layers[0].direct + r.layers[1].direct);
	const std::string csv = network_csv(r);
	EXPECT_NE(csv.find("a,5x5,2,14x14,"), std::string::npos);
	EXPECT_NE(csv.find("TOTAL"), std::string::npos);
	EXPECT_EQ(network_json(r)["total"]["dwm"], r.total_dwm);
}

TEST(Network, MalformedLayerNamed)
{
	try
	{
		parse_network(json::parse(R"({"schema":1,"layers":[{"name":"conv9","in_channels":3,"kernel":3,"input":14}]})"));
		FAIL() << "expected ConfigError";
	} catch (const ConfigError &e)
	{
		EXPECT_NE(std::string(e.what()).find("conv9"), std::string::npos);
		EXPECT_NE(std::string(e.what()).find("out_channels"), std::string::npos);
	}
	EXPECT_THROW(parse_network(json::parse(R"({"schema":1,"layers":[{"name":"x","in_channels":3,"out_channels":3,"kernel":9,"input":4}]})")),
			ConfigError);
}

TEST(Network, BundledAlexNet)
{
	const NetworkReport r = analyze_network(parse_network(load("networks/alexnet.json")));
	ASSERT_EQ(r.layers.size(), 5u);
	const LayerReport &conv1 = r.layers[0];
	EXPECT_EQ(conv1.conv.kernel, (Index2 { 11, 11 }));
	EXPECT_EQ(conv1.out, (Index2 { 55, 55 }));
	const double speedup = static_cast<double>(conv1.direct) / static_cast<double>(conv1.dwm);
	EXPECT_GE(speedup, 2.0);
	EXPECT_LE(speedup, 2.2);
	EXPECT_LT(r.total_dwm, r.total_direct);
}

TEST(Network, BundledGoogLeNet)
{
	const NetworkReport r = analyze_network(parse_network(load("networks/googlenet.json")));
	EXPECT_EQ(r.layers.size(), 57u);
	EXPECT_LT(r.total_dwm, r.total_winograd);
	EXPECT_LT(r.total_winograd, r.total_direct);
}
