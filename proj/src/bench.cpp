#include <dwm/bench.hpp>
#include <dwm/conv.hpp>
#include <dwm/decompose.hpp>
#include <dwm/random.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace dwm {

using nlohmann::json;

namespace {

std::string format(const char *fmt, double value)
{
	char buffer[48];
	std::snprintf(buffer, sizeof(buffer), fmt, value);
	return buffer;
}

template<typename T>
std::optional<double> measure(Algorithm algorithm, const Tensor4<double> &d, const Tensor4<double> &g, const ConvSpec &spec,
		const DecompositionPlan &plan, const Tensor4<double> &reference)
{
	const Tensor4<T> dt = tensor_cast<T>(d);
	const Tensor4<T> gt = tensor_cast<T>(g);
	try
	{
		switch (algorithm)
		{
			case Algorithm::direct:
				return mse(direct_conv2d(dt, gt, spec).y, reference);
			case Algorithm::winograd:
				return mse(winograd_conv2d(dt, gt, spec).y, reference);
			case Algorithm::dwm:
				return mse(dwm_conv2d(dt, gt, spec, plan).y, reference);
		}
	} catch (const NonFiniteError&)
	{
		return std::nullopt;
	}
	return std::nullopt;
}

// ---- json field helpers

const json& field(const json &obj, const char *key, const std::string &context)
{
	if (!obj.is_object() || !obj.contains(key))
		throw ConfigError(context + ": missing field '" + key + "'");
	return obj.at(key);
}

std::size_t positive(const json &value, const char *key, const std::string &context, bool allow_zero = false)
{
	if (!value.is_number_integer() || value.get<long long>() < (allow_zero ? 0 : 1))
		throw ConfigError(context + ": field '" + key + "' must be a " + (allow_zero ? "non-negative" : "positive") + " integer");
	return value.get<std::size_t>();
}

std::size_t get_size(const json &obj, const char *key, const std::string &context, bool allow_zero = false)
{
	return positive(field(obj, key, context), key, context, allow_zero);
}

/// Integer or [row, col] pair.
Index2 get_pair(const json &obj, const char *key, const std::string &context, bool allow_zero = false)
{
	const json &value = field(obj, key, context);
	if (value.is_array())
	{
		if (value.size() != 2)
			throw ConfigError(context + ": field '" + key + "' must be an integer or a pair");
		return Index2 { positive(value[0], key, context, allow_zero), positive(value[1], key, context, allow_zero) };
	}
	const std::size_t v = positive(value, key, context, allow_zero);
	return Index2 { v, v };
}

/// Integer (all sides) or [top, bottom, left, right].
Padding get_padding(const json &obj, const std::string &context)
{
	if (!obj.contains("pad"))
		return Padding { };
	const json &value = obj.at("pad");
	if (value.is_array())
	{
		if (value.size() != 4)
			throw ConfigError(context + ": field 'pad' must be an integer or [top, bottom, left, right]");
		return Padding { positive(value[0], "pad", context, true), positive(value[1], "pad", context, true), positive(value[2], "pad", context, true),
				positive(value[3], "pad", context, true) };
	}
	const std::size_t p = positive(value, "pad", context, true);
	return Padding { p, p, p, p };
}

void check_schema(const json &doc, const std::string &what)
{
	if (!doc.is_object())
		throw ConfigError(what + ": top level must be an object");
	if (!doc.contains("schema") || doc.at("schema") != 1)
		throw ConfigError(what + ": expected \"schema\": 1");
}

std::string entry_context(std::size_t index)
{
	return "configs[" + std::to_string(index) + "]";
}

FlopReference parse_reference(const json &value, const std::string &context)
{
	if (!value.is_object())
		throw ConfigError(context + ": 'reference' must be an object");
	FlopReference ref;
	if (value.contains("direct"))
		ref.direct = positive(value.at("direct"), "direct", context);
	if (value.contains("dwm"))
		ref.dwm = positive(value.at("dwm"), "dwm", context);
	if (value.contains("dwm_speedup"))
		ref.dwm_speedup = value.at("dwm_speedup").get<std::string>();
	if (value.contains("winograd_speedup"))
	{
		ref.winograd_speedup = value.at("winograd_speedup").get<std::string>();
		ref.winograd_na = *ref.winograd_speedup == "N/A";
	}
	if (value.contains("published_winograd"))
		ref.published_winograd = value.at("published_winograd").get<std::string>();
	return ref;
}

json optional_count(const std::optional<std::uint64_t> &value)
{
	return value ? json(*value) : json(nullptr);
}

}

std::string to_string(Algorithm a)
{
	switch (a)
	{
		case Algorithm::direct:
			return "direct";
		case Algorithm::winograd:
			return "winograd";
		case Algorithm::dwm:
			return "dwm";
	}
	return "?";
}

ConvSpec AccuracyConfig::spec() const
{
	const std::size_t before = (kernel - 1) / 2;
	const std::size_t after = kernel - 1 - before;
	return ConvSpec { { kernel, kernel }, { stride, stride }, { before, after, before, after } };
}

std::optional<double> AccuracyRow::log_scaled() const
{
	if (!mse || *mse <= 0.0)
		return std::nullopt;
	return std::log10(*mse) + 10.0;
}

AccuracyReport run_accuracy_suite(const std::vector<AccuracyConfig> &configs)
{
	AccuracyReport report;
	for (std::size_t index = 0; index < configs.size(); index++)
	{
		const AccuracyConfig &config = configs[index];
		const ConvSpec spec = config.spec();
		const DecompositionPlan plan = plan_decomposition(spec);
		for (std::uint64_t seed : config.seeds)
		{
			NormalGenerator rng(seed);
			const Tensor4<double> d = random_normal(Dims4 { config.batch, config.channels, config.hw, config.hw }, rng);
			const Tensor4<double> g = random_normal(Dims4 { config.filters, config.channels, config.kernel, config.kernel }, rng);
			const Tensor4<double> reference = direct_conv2d(d, g, spec).y;

			for (Precision precision : config.precisions)
				for (Algorithm algorithm : { Algorithm::direct, Algorithm::winograd, Algorithm::dwm })
				{
					if (algorithm == Algorithm::winograd && config.stride != 1)
						continue;
					AccuracyRow row { index, config.kernel, config.stride, config.hw, config.channels, config.filters, algorithm, precision, seed, std::nullopt };
					if (precision == Precision::binary32)
						row.mse = measure<float>(algorithm, d, g, spec, plan, reference);
					else
						row.mse = measure<double>(algorithm, d, g, spec, plan, reference);
					report.rows.push_back(row);
				}
		}
	}
	return report;
}

AccuracyReport run_accuracy_suite(std::vector<AccuracyConfig> configs, const std::vector<std::uint64_t> &seeds)
{
	for (AccuracyConfig &config : configs)
		config.seeds = seeds;
	return run_accuracy_suite(configs);
}

std::string accuracy_csv(const AccuracyReport &report)
{
	std::ostringstream csv;
	csv << "kernel,stride,hw,channels,filters,algorithm,precision,seed,mse,log_scaled,status\n";
	for (const AccuracyRow &row : report.rows)
	{
		csv << row.kernel << 'x' << row.kernel << ',' << row.stride << ',' << row.hw << ',' << row.channels << ',' << row.filters << ','
				<< to_string(row.algorithm) << ',' << to_string(row.precision) << ',' << row.seed << ',';
		if (row.overflow())
			csv << "NaN,,overflow\n";
		else
		{
			const auto scaled = row.log_scaled();
			csv << format("%.3E", *row.mse) << ',' << (scaled ? format("%.3f", *scaled) : std::string()) << ",ok\n";
		}
	}
	return csv.str();
}

json accuracy_json(const AccuracyReport &report)
{
	json rows = json::array();
	for (const AccuracyRow &row : report.rows)
	{
		const auto scaled = row.log_scaled();
		rows.push_back(
				json { { "config", row.config_index }, { "kernel", row.kernel }, { "stride", row.stride }, { "hw", row.hw }, { "channels", row.channels }, {
						"filters", row.filters }, { "algorithm", to_string(row.algorithm) }, { "precision", to_string(row.precision) }, { "seed", row.seed }, {
						"mse", row.mse ? json(*row.mse) : json(nullptr) }, { "log_scaled", scaled ? json(*scaled) : json(nullptr) }, { "status",
						row.overflow() ? "overflow" : "ok" } });
	}
	return json { { "schema", 1 }, { "suite", "accuracy" }, { "rows", rows } };
}

std::vector<BandCheck> check_accuracy_bands(const AccuracyReport &report)
{
	std::vector<BandCheck> checks;
	auto describe = [](const AccuracyRow &row)
	{
		return std::to_string(row.kernel) + "x" + std::to_string(row.kernel) + " s" + std::to_string(row.stride) + " hw" + std::to_string(row.hw) + " c"
				+ std::to_string(row.channels) + " seed " + std::to_string(row.seed) + ": mse " + (row.mse ? format("%.3E", *row.mse) : "NaN");
	};

	// key: (config shape without kernel, seed) -> direct f32 mse per config
	std::map<std::pair<std::size_t, std::uint64_t>, double> direct_f32;
	for (const AccuracyRow &row : report.rows)
		if (row.algorithm == Algorithm::direct && row.precision == Precision::binary32 && row.mse)
			direct_f32[ { row.config_index, row.seed }] = *row.mse;

	for (const AccuracyRow &row : report.rows)
	{
		const bool f32 = row.precision == Precision::binary32;
		if (row.algorithm == Algorithm::direct && !f32)
			checks.push_back( { "direct f64 exact", row.mse && *row.mse == 0.0, describe(row) });
		if (row.algorithm == Algorithm::dwm && !f32)
			checks.push_back( { "dwm f64 <= 1e-20", row.mse && *row.mse <= bands::dwm_f64_max_mse, describe(row) });
		if (row.algorithm == Algorithm::dwm && f32)
		{
			checks.push_back( { "dwm f32 <= 1e-7", row.mse && *row.mse <= bands::dwm_f32_max_mse, describe(row) });
			const auto it = direct_f32.find( { row.config_index, row.seed });
			if (it != direct_f32.end() && row.mse && *row.mse > 0.0 && it->second > 0.0)
			{
				const double decades = std::abs(std::log10(*row.mse / it->second));
				checks.push_back( { "dwm f32 within 2 decades of direct f32", decades <= bands::dwm_vs_direct_f32_decades, describe(row) + format(
						" vs direct %.3E", it->second) });
			}
		}
		if (row.algorithm == Algorithm::winograd && f32 && row.kernel >= bands::winograd_large_kernel)
			checks.push_back( { "winograd f32 >= 1e-4 for r >= 7", !row.mse || *row.mse >= bands::winograd_f32_min_mse, describe(row) });
	}

	// monotone in kernel size for fixed (hw, channels, filters, stride, seed)
	using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::uint64_t>;
	std::map<Key, std::map<std::size_t, std::optional<double>>> sweeps;
	for (const AccuracyRow &row : report.rows)
		if (row.algorithm == Algorithm::winograd && row.precision == Precision::binary32)
			sweeps[ { row.hw, row.channels, row.filters, row.stride, row.seed }][row.kernel] = row.mse;
	for (const auto &[key, sweep] : sweeps)
	{
		if (sweep.size() < 2)
			continue;
		bool monotone = true;
		std::string detail = "hw " + std::to_string(std::get<0>(key)) + " c " + std::to_string(std::get<1>(key)) + " seed "
				+ std::to_string(std::get<4>(key)) + ":";
		double previous = 0.0;
		for (const auto &[kernel, value] : sweep)
		{
			const double v = value ? *value : INFINITY;
			detail += " r" + std::to_string(kernel) + "=" + (value ? format("%.3E", *value) : "NaN");
			if (v < previous)
				monotone = false;
			previous = v;
		}
		checks.push_back( { "winograd f32 non-decreasing in kernel size", monotone, detail });
	}
	return checks;
}

std::vector<FlopReport> run_flops_suite(const std::vector<FlopSuiteEntry> &entries)
{
	std::vector<FlopConfig> configs;
	for (const FlopSuiteEntry &entry : entries)
		configs.push_back(entry.config);
	return speedup_table(configs);
}

json flops_json(const std::vector<FlopSuiteEntry> &entries, const std::vector<FlopReport> &reports)
{
	json rows = json::array();
	for (std::size_t i = 0; i < reports.size(); i++)
	{
		const FlopReport &r = reports[i];
		json row { { "kernel", { r.spec.kernel.row, r.spec.kernel.col } }, { "stride", { r.spec.stride.row, r.spec.stride.col } }, { "out", { r.out.row,
				r.out.col } }, { "direct", r.direct_mults }, { "winograd", optional_count(r.winograd_mults) }, { "winograd_speedup",
				r.speedup_winograd ? json(format_fixed2(*r.speedup_winograd)) : json("N/A") }, { "dwm", r.dwm_mults }, { "dwm_speedup", format_fixed2(
				r.speedup_dwm) } };
		if (i < entries.size() && entries[i].reference && entries[i].reference->published_winograd)
			row["published_winograd"] = *entries[i].reference->published_winograd;
		rows.push_back(row);
	}
	return json { { "schema", 1 }, { "suite", "flops" }, { "winograd_convention",
			"elementwise tiles*l^2 + per-tile 2*l*nsf(B_t) + per-pair nsf(G)*(r+l); shift-free entries (0, +-2^k) are free; output transform not counted" }, {
			"rows", rows } };
}

std::vector<BandCheck> check_flop_references(const std::vector<FlopSuiteEntry> &entries, const std::vector<FlopReport> &reports)
{
	std::vector<BandCheck> checks;
	for (std::size_t i = 0; i < entries.size() && i < reports.size(); i++)
	{
		if (!entries[i].reference)
			continue;
		const FlopReference &ref = *entries[i].reference;
		const FlopReport &r = reports[i];
		const std::string label = "configs[" + std::to_string(i) + "] " + std::to_string(r.spec.kernel.row) + "x" + std::to_string(r.spec.kernel.col) + " s"
				+ std::to_string(r.spec.stride.row);
		if (ref.direct)
			checks.push_back( { "direct count", r.direct_mults == *ref.direct, label + ": " + std::to_string(r.direct_mults) + " vs " + std::to_string(
					*ref.direct) });
		if (ref.dwm)
			checks.push_back( { "dwm count", r.dwm_mults == *ref.dwm, label + ": " + std::to_string(r.dwm_mults) + " vs " + std::to_string(*ref.dwm) });
		if (ref.dwm_speedup)
			checks.push_back( { "dwm speedup", format_fixed2(r.speedup_dwm) == *ref.dwm_speedup, label + ": " + format_fixed2(r.speedup_dwm) + " vs "
					+ *ref.dwm_speedup });
		if (ref.winograd_speedup)
		{
			const std::string actual = r.speedup_winograd ? format_fixed2(*r.speedup_winograd) : "N/A";
			checks.push_back( { "winograd speedup", actual == *ref.winograd_speedup, label + ": " + actual + " vs " + *ref.winograd_speedup });
		}
	}
	return checks;
}

BenchConfig parse_bench_config(const json &doc)
{
	check_schema(doc, "bench config");
	BenchConfig config;
	const json &suite = field(doc, "suite", "bench config");
	if (!suite.is_string() || (suite != "flops" && suite != "accuracy"))
		throw ConfigError("bench config: 'suite' must be \"flops\" or \"accuracy\"");
	config.suite = suite.get<std::string>();
	const json &entries = field(doc, "configs", "bench config");
	if (!entries.is_array())
		throw ConfigError("bench config: 'configs' must be an array");

	for (std::size_t i = 0; i < entries.size(); i++)
	{
		const json &entry = entries[i];
		const std::string context = entry_context(i);
		if (!entry.is_object())
			throw ConfigError(context + ": entry must be an object");
		if (config.suite == "flops")
		{
			FlopSuiteEntry flop;
			flop.config.spec.kernel = get_pair(entry, "kernel", context);
			flop.config.spec.stride = entry.contains("stride") ? get_pair(entry, "stride", context) : Index2 { 1, 1 };
			flop.config.out = entry.contains("out") ? get_pair(entry, "out", context) : get_pair(entry, "hw", context);
			if (entry.contains("reference"))
				flop.reference = parse_reference(entry.at("reference"), context);
			config.flops.push_back(flop);
		}
		else
		{
			AccuracyConfig acc;
			acc.kernel = get_size(entry, "kernel", context);
			acc.stride = entry.contains("stride") ? get_size(entry, "stride", context) : 1;
			acc.hw = get_size(entry, "hw", context);
			acc.channels = get_size(entry, "channels", context);
			acc.filters = get_size(entry, "filters", context);
			if (entry.contains("batch"))
				acc.batch = get_size(entry, "batch", context);
			if (acc.hw < acc.kernel)
				throw ConfigError(context + ": hw is smaller than the kernel");
			if (entry.contains("precisions"))
			{
				acc.precisions.clear();
				for (const json &p : entry.at("precisions"))
				{
					if (!p.is_string())
						throw ConfigError(context + ": precisions must be strings");
					try
					{
						acc.precisions.push_back(parse_precision(p.get<std::string>()));
					} catch (const std::invalid_argument &e)
					{
						throw ConfigError(context + ": " + e.what());
					}
				}
			}
			if (entry.contains("seeds"))
			{
				acc.seeds.clear();
				for (const json &s : entry.at("seeds"))
					acc.seeds.push_back(positive(s, "seeds", context, true));
			}
			config.accuracy.push_back(acc);
		}
	}
	return config;
}

NetworkSpec parse_network(const json &doc)
{
	check_schema(doc, "network spec");
	NetworkSpec net;
	net.name = doc.value("name", std::string("network"));
	const json &layers = field(doc, "layers", "network spec");
	if (!layers.is_array())
		throw ConfigError("network spec: 'layers' must be an array");
	for (std::size_t i = 0; i < layers.size(); i++)
	{
		const json &entry = layers[i];
		std::string context = "layers[" + std::to_string(i) + "]";
		if (!entry.is_object())
			throw ConfigError(context + ": layer must be an object");
		LayerSpec layer;
		if (entry.contains("name") && entry.at("name").is_string())
			layer.name = entry.at("name").get<std::string>();
		else
			layer.name = context;
		context = "layer '" + layer.name + "'";
		layer.in_channels = get_size(entry, "in_channels", context);
		layer.out_channels = get_size(entry, "out_channels", context);
		layer.conv.kernel = get_pair(entry, "kernel", context);
		layer.conv.stride = entry.contains("stride") ? get_pair(entry, "stride", context) : Index2 { 1, 1 };
		layer.conv.pad = get_padding(entry, context);
		layer.input = get_pair(entry, "input", context);
		try
		{
			layer.conv.validate(layer.input.row, layer.input.col);
		} catch (const ShapeError &e)
		{
			throw ConfigError(context + ": " + e.what());
		}
		net.layers.push_back(layer);
	}
	return net;
}

NetworkReport analyze_network(const NetworkSpec &net)
{
	NetworkReport report;
	report.name = net.name;
	for (const LayerSpec &layer : net.layers)
	{
		LayerReport lr;
		lr.name = layer.name;
		lr.conv = layer.conv;
		lr.out = layer.conv.output_extent(layer.input.row, layer.input.col);
		const std::uint64_t scale = static_cast<std::uint64_t>(layer.in_channels) * layer.out_channels;
		lr.direct = flops_direct(layer.conv, lr.out) * scale;
		lr.accelerated = !(layer.conv.kernel.row == 1 && layer.conv.kernel.col == 1);
		if (lr.accelerated)
		{
			const auto winograd = flops_winograd_classic(layer.conv, lr.out);
			if (winograd)
				lr.winograd = *winograd * scale;
			lr.dwm = flops_dwm(plan_decomposition(layer.conv), lr.out) * scale;
		}
		else
		{
			lr.winograd = lr.direct;
			lr.dwm = lr.direct;
		}
		report.total_direct += lr.direct;
		report.total_winograd += lr.winograd ? *lr.winograd : lr.direct;
		report.total_dwm += lr.dwm;
		report.layers.push_back(lr);
	}
	return report;
}

std::string network_csv(const NetworkReport &report)
{
	std::ostringstream csv;
	auto ratio = [](std::uint64_t a, std::uint64_t b)
	{
		return format_fixed2(static_cast<double>(a) / static_cast<double>(b));
	};
	csv << "layer,kernel,stride,out,direct,winograd,winograd_speedup,dwm,dwm_speedup\n";
	for (const LayerReport &l : report.layers)
	{
		csv << l.name << ',' << l.conv.kernel.row << 'x' << l.conv.kernel.col << ',' << l.conv.stride.row << ',' << l.out.row << 'x' << l.out.col << ','
				<< format_sci3(l.direct) << ',';
		if (l.winograd)
			csv << format_sci3(*l.winograd) << ',' << ratio(l.direct, *l.winograd) << ',';
		else
			csv << "N/A,N/A,";
		csv << format_sci3(l.dwm) << ',' << ratio(l.direct, l.dwm) << '\n';
	}
	csv << "TOTAL,,,," << format_sci3(report.total_direct) << ',' << format_sci3(report.total_winograd) << ','
			<< ratio(report.total_direct, report.total_winograd) << ',' << format_sci3(report.total_dwm) << ','
			<< ratio(report.total_direct, report.total_dwm) << '\n';
	return csv.str();
}

json network_json(const NetworkReport &report)
{
	json layers = json::array();
	for (const LayerReport &l : report.layers)
		layers.push_back(
				json { { "name", l.name }, { "kernel", { l.conv.kernel.row, l.conv.kernel.col } }, { "stride", { l.conv.stride.row, l.conv.stride.col } }, {
						"out", { l.out.row, l.out.col } }, { "direct", l.direct }, { "winograd", optional_count(l.winograd) }, { "dwm", l.dwm }, { "accelerated",
						l.accelerated } });
	return json { { "schema", 1 }, { "network", report.name }, { "layers", layers }, { "total", { { "direct", report.total_direct }, { "winograd",
			report.total_winograd }, { "dwm", report.total_dwm } } } };
}

} // namespace dwm
