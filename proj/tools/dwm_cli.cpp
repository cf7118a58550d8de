#include <dwm/bench.hpp>
#include <dwm/conv.hpp>
#include <dwm/decompose.hpp>
#include <dwm/dump.hpp>
#include <dwm/random.hpp>
#include <dwm/tensor_io.hpp>
#include <dwm/transform.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dwm;
using nlohmann::json;

namespace {

constexpr int exit_error = 1;
constexpr int exit_check_failed = 2;

class UsageError : public std::runtime_error
{
	public:
		using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string &text)
{
	std::vector<std::string> items;
	std::stringstream stream(text);
	std::string item;
	while (std::getline(stream, item, ','))
		items.push_back(item);
	if (!text.empty() && text.back() == ',')
		items.emplace_back();
	return items;
}

std::size_t parse_count(const std::string &text, const std::string &what)
{
	std::size_t pos = 0;
	unsigned long long value = 0;
	try
	{
		value = std::stoull(text, &pos);
	} catch (const std::exception&)
	{
		pos = 0;
	}
	if (text.empty() || pos != text.size() || text[0] == '-')
		throw UsageError("invalid " + what + " '" + text + "'");
	return value;
}

/// "3" or "3,5".
Index2 parse_pair(const std::string &text, const std::string &what)
{
	const auto items = split_list(text);
	if (items.size() == 1)
	{
		const std::size_t v = parse_count(items[0], what);
		return { v, v };
	}
	if (items.size() == 2)
		return { parse_count(items[0], what), parse_count(items[1], what) };
	throw UsageError("invalid " + what + " '" + text + "': expected N or H,W");
}

/// "1" (all sides), "1,2" (vertical, horizontal) or "t,b,l,r".
Padding parse_padding(const std::string &text)
{
	const auto items = split_list(text);
	std::vector<std::size_t> v;
	for (const auto &item : items)
		v.push_back(parse_count(item, "padding"));
	if (v.size() == 1)
		return { v[0], v[0], v[0], v[0] };
	if (v.size() == 2)
		return { v[0], v[0], v[1], v[1] };
	if (v.size() == 4)
		return { v[0], v[1], v[2], v[3] };
	throw UsageError("invalid padding '" + text + "': expected P, PH,PW or T,B,L,R");
}

json read_json_file(const std::string &path)
{
	std::ifstream stream(path);
	if (!stream)
		throw UsageError("cannot open " + path);
	try
	{
		return json::parse(stream);
	} catch (const json::parse_error &e)
	{
		throw ConfigError(path + ": invalid JSON: " + e.what());
	}
}

void write_text_file(const std::string &path, const std::string &text)
{
	std::ofstream stream(path, std::ios::binary | std::ios::trunc);
	if (!stream)
		throw UsageError("cannot open " + path + " for writing");
	stream << text;
	if (!stream)
		throw UsageError("failed to write " + path);
}

std::string dump(const json &doc)
{
	return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- gen-transforms

struct GenTransformsArgs
{
	int m = 2;
	int r = 3;
	std::string points;
	bool has_points = false;
	std::string out;
	int trials = 200;
};

int run_gen_transforms(const GenTransformsArgs &args)
{
	if (args.m < 1 || args.r < 1)
		throw UsageError("m and r must be positive");
	TransformSet ts;
	if (args.has_points)
	{
		std::vector<Rational> points;
		if (!args.points.empty())
			for (const auto &item : split_list(args.points))
				points.push_back(Rational::parse(item));
		ts = cook_toom(args.m, args.r, points);
	}
	else
		ts = *transform_for(args.m, args.r);

	const VerifyResult check = verify_transform(ts, args.trials);
	if (!check.passed)
	{
		std::cerr << "error: F(" << args.m << "," << args.r << ") failed verification after " << check.trials_run << " trials\n";
		return exit_error;
	}
	const std::string text = dump(transform_json(ts));
	if (args.out.empty())
		std::cout << text;
	else
	{
		write_text_file(args.out, text);
		std::cout << "F(" << args.m << "," << args.r << ") verified on " << check.trials_run << " trials, written to " << args.out << "\n";
	}
	return 0;
}

// ---------------------------------------------------------------- plan

struct PlanArgs
{
	std::string kernel = "3";
	std::string stride = "1";
	std::string pad = "0";
	std::string out;
};

int run_plan(const PlanArgs &args)
{
	ConvSpec spec { parse_pair(args.kernel, "kernel"), parse_pair(args.stride, "stride"), parse_padding(args.pad) };
	const DecompositionPlan plan = plan_decomposition(spec);
	const std::string text = dump(plan_json(plan));
	if (args.out.empty())
		std::cout << text;
	else
	{
		write_text_file(args.out, text);
		std::cout << to_string(spec) << ": " << plan.parts.size() << " parts, written to " << args.out << "\n";
	}
	return 0;
}

// ---------------------------------------------------------------- conv

struct ConvArgs
{
	std::string algo = "dwm";
	std::string kernel;
	std::string stride = "1";
	std::string pad = "0";
	std::string in;
	std::string weights;
	std::string precision = "f64";
	std::string out;
	bool verify = false;
};

template<typename T>
int run_conv_typed(const ConvArgs &args, const ConvSpec &spec, const AnyTensor &d_any, const AnyTensor &g_any)
{
	const Tensor4<T> d = as_precision<T>(d_any);
	const Tensor4<T> g = as_precision<T>(g_any);
	ConvOutput<T> result;
	if (args.algo == "direct")
		result = direct_conv2d(d, g, spec);
	else if (args.algo == "winograd")
		result = winograd_conv2d(d, g, spec);
	else
		result = dwm_conv2d(d, g, spec, plan_decomposition(spec));

	std::cout << "algorithm " << args.algo << ", " << to_string(spec) << ", precision " << to_string(precision_of<T>::value) << "\n";
	std::cout << "output " << to_string(result.y.dims()) << ", multiplications " << result.flops << "\n";
	if (args.verify)
	{
		const Tensor4<T> reference = direct_conv2d(d, g, spec).y;
		char line[64];
		std::snprintf(line, sizeof(line), "%.3E", max_abs_diff(result.y, reference));
		std::cout << "max_abs_diff vs direct " << line << "\n";
	}
	if (!args.out.empty())
	{
		write_tensor_file(args.out, AnyTensor(result.y));
		std::cout << "written to " << args.out << "\n";
	}
	return 0;
}

int run_conv(const ConvArgs &args)
{
	const Precision precision = parse_precision(args.precision);
	const AnyTensor d = read_tensor_file(args.in);
	const AnyTensor g = read_tensor_file(args.weights);
	const Dims4 gd = std::visit([](const auto &t)
	{	return t.dims();}, g);

	ConvSpec spec;
	spec.kernel = args.kernel.empty() ? Index2 { gd.h, gd.w } : parse_pair(args.kernel, "kernel");
	spec.stride = parse_pair(args.stride, "stride");
	spec.pad = parse_padding(args.pad);
	if (spec.kernel.row != gd.h || spec.kernel.col != gd.w)
		throw UsageError("--kernel " + args.kernel + " does not match weights " + to_string(gd));
	if (args.algo == "winograd" && (spec.stride.row != 1 || spec.stride.col != 1))
		throw UsageError("classic Winograd is not applicable to stride > 1; use --algo dwm");

	if (precision == Precision::binary32)
		return run_conv_typed<float>(args, spec, d, g);
	return run_conv_typed<double>(args, spec, d, g);
}

// ---------------------------------------------------------------- make-tensor

struct MakeTensorArgs
{
	std::string dims;
	std::uint64_t seed = 1;
	std::string precision = "f64";
	std::string out;
};

int run_make_tensor(const MakeTensorArgs &args)
{
	const auto items = split_list(args.dims);
	if (items.size() != 4)
		throw UsageError("--dims expects N,C,H,W");
	const Dims4 dims { parse_count(items[0], "dimension"), parse_count(items[1], "dimension"), parse_count(items[2], "dimension"), parse_count(items[3],
			"dimension") };
	NormalGenerator rng(args.seed);
	const Tensor4<double> t = random_normal(dims, rng);
	if (parse_precision(args.precision) == Precision::binary32)
		write_tensor_file(args.out, AnyTensor(tensor_cast<float>(t)));
	else
		write_tensor_file(args.out, AnyTensor(t));
	std::cout << to_string(dims) << " " << args.precision << " seed " << args.seed << " written to " << args.out << "\n";
	return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs
{
	std::string suite;
	std::string config;
	std::string out;
	std::string json_out;
	std::string seeds;
	bool check = false;
};

int report_checks(const std::vector<BandCheck> &checks)
{
	std::size_t failed = 0;
	for (const BandCheck &c : checks)
	{
		if (!c.passed)
			failed++;
		std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
	}
	std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
	return failed == 0 ? 0 : exit_check_failed;
}

int run_bench(const BenchArgs &args)
{
	BenchConfig config = parse_bench_config(read_json_file(args.config));
	if (!args.suite.empty() && args.suite != config.suite)
		throw ConfigError(args.config + ": suite is \"" + config.suite + "\" but --suite " + args.suite + " was requested");

	std::string csv;
	json doc;
	std::vector<BandCheck> checks;
	if (config.suite == "flops")
	{
		const auto reports = run_flops_suite(config.flops);
		csv = flops_csv(reports);
		doc = flops_json(config.flops, reports);
		checks = check_flop_references(config.flops, reports);
	}
	else
	{
		AccuracyReport report;
		if (args.seeds.empty())
			report = run_accuracy_suite(config.accuracy);
		else
		{
			std::vector<std::uint64_t> seeds;
			for (const auto &item : split_list(args.seeds))
				seeds.push_back(parse_count(item, "seed"));
			report = run_accuracy_suite(config.accuracy, seeds);
		}
		csv = accuracy_csv(report);
		doc = accuracy_json(report);
		checks = check_accuracy_bands(report);
	}

	std::cout << csv;
	if (!args.out.empty())
		write_text_file(args.out, csv);
	if (!args.json_out.empty())
		write_text_file(args.json_out, dump(doc));
	if (args.check)
		return report_checks(checks);
	return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs
{
	std::string network;
	std::string out;
	std::string json_out;
};

int run_analyze(const AnalyzeArgs &args)
{
	const NetworkReport report = analyze_network(parse_network(read_json_file(args.network)));
	const std::string csv = network_csv(report);
	std::cout << report.name << " (" << report.layers.size() << " conv layers)\n" << csv;
	if (!args.out.empty())
		write_text_file(args.out, csv);
	if (!args.json_out.empty())
		write_text_file(args.json_out, dump(network_json(report)));
	return 0;
}

}

int main(int argc, char **argv)
{
	CLI::App app { "Decomposable Winograd convolution toolkit" };
	app.require_subcommand(1);
	int status = 0;
	std::function<int()> action;

	GenTransformsArgs gen;
	auto *gen_cmd = app.add_subcommand("gen-transforms", "Construct, verify and dump the F(m, r) transform matrices");
	gen_cmd->add_option("m", gen.m, "Outputs per tile")->required();
	gen_cmd->add_option("r", gen.r, "Filter taps")->required();
	auto *points_opt = gen_cmd->add_option("--points", gen.points, "Comma-separated finite interpolation points (p or p/q)")->allow_extra_args(false);
	gen_cmd->add_option("--trials", gen.trials, "Random exact verification trials")->check(CLI::PositiveNumber);
	gen_cmd->add_option("--out", gen.out, "Write JSON to this file");
	gen_cmd->callback([&]
	{
		gen.has_points = points_opt->count() > 0;
		action = [&]
		{	return run_gen_transforms(gen);};
	});

	PlanArgs plan;
	auto *plan_cmd = app.add_subcommand("plan", "Show the decomposition of a kernel into stride-1 parts");
	plan_cmd->add_option("--kernel", plan.kernel, "Kernel size R or RH,RW")->required();
	plan_cmd->add_option("--stride", plan.stride, "Stride S or SH,SW");
	plan_cmd->add_option("--pad", plan.pad, "Padding P, PH,PW or T,B,L,R");
	plan_cmd->add_option("--out", plan.out, "Write JSON to this file");
	plan_cmd->callback([&]
	{
		action = [&]
		{	return run_plan(plan);};
	});

	ConvArgs conv;
	auto *conv_cmd = app.add_subcommand("conv", "Run one convolution on tensor files");
	conv_cmd->add_option("--algo", conv.algo, "Algorithm")->check(CLI::IsMember( { "direct", "winograd", "dwm" }));
	conv_cmd->add_option("--kernel", conv.kernel, "Kernel size R or RH,RW (defaults to the weight extent)");
	conv_cmd->add_option("--stride", conv.stride, "Stride S or SH,SW");
	conv_cmd->add_option("--pad", conv.pad, "Padding P, PH,PW or T,B,L,R");
	conv_cmd->add_option("--in", conv.in, "Input tensor file (N,C,H,W)")->required()->check(CLI::ExistingFile);
	conv_cmd->add_option("--weights", conv.weights, "Weight tensor file (F,C,R,R)")->required()->check(CLI::ExistingFile);
	conv_cmd->add_option("--precision", conv.precision, "Arithmetic precision")->check(CLI::IsMember( { "f32", "f64" }));
	conv_cmd->add_option("--out", conv.out, "Output tensor file");
	conv_cmd->add_flag("--verify", conv.verify, "Report max abs difference against direct convolution");
	conv_cmd->callback([&]
	{
		action = [&]
		{	return run_conv(conv);};
	});

	MakeTensorArgs make;
	auto *make_cmd = app.add_subcommand("make-tensor", "Write a tensor of N(0,1) samples");
	make_cmd->add_option("--dims", make.dims, "N,C,H,W")->required();
	make_cmd->add_option("--seed", make.seed, "Generator seed");
	make_cmd->add_option("--precision", make.precision, "Element type")->check(CLI::IsMember( { "f32", "f64" }));
	make_cmd->add_option("--out", make.out, "Output tensor file")->required();
	make_cmd->callback([&]
	{
		action = [&]
		{	return run_make_tensor(make);};
	});

	BenchArgs bench;
	auto *bench_cmd = app.add_subcommand("bench", "Run the flops or accuracy suite from a config file");
	bench_cmd->add_option("--suite", bench.suite, "Expected suite")->check(CLI::IsMember( { "flops", "accuracy" }));
	bench_cmd->add_option("--config", bench.config, "Suite config JSON")->required()->check(CLI::ExistingFile);
	bench_cmd->add_option("--out", bench.out, "Write CSV to this file");
	bench_cmd->add_option("--json", bench.json_out, "Write JSON to this file");
	bench_cmd->add_option("--seeds", bench.seeds, "Comma-separated seeds replacing the config's seeds (accuracy suite)");
	bench_cmd->add_flag("--check", bench.check, "Evaluate reference values / accuracy bands; exit 2 on failure");
	bench_cmd->callback([&]
	{
		action = [&]
		{	return run_bench(bench);};
	});

	AnalyzeArgs analyze;
	auto *analyze_cmd = app.add_subcommand("analyze", "Per-layer multiplication counts for a network spec");
	analyze_cmd->add_option("--network", analyze.network, "Network spec JSON")->required()->check(CLI::ExistingFile);
	analyze_cmd->add_option("--out", analyze.out, "Write CSV to this file");
	analyze_cmd->add_option("--json", analyze.json_out, "Write JSON to this file");
	analyze_cmd->callback([&]
	{
		action = [&]
		{	return run_analyze(analyze);};
	});

	try
	{
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e)
	{
		return app.exit(e);
	}

	try
	{
		status = action();
	} catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return exit_error;
	}
	return status;
}
