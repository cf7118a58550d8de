#pragma once

#include <dwm/conv_spec.hpp>
#include <dwm/flops.hpp>
#include <dwm/tensor.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dwm {

class ConfigError : public std::runtime_error
{
	public:
		using std::runtime_error::runtime_error;
};

enum class Algorithm
{
	direct,
	winograd,
	dwm
};

std::string to_string(Algorithm a);

// ---------------------------------------------------------------- accuracy

struct AccuracyConfig
{
	std::size_t kernel = 3;
	std::size_t stride = 1;
	std::size_t hw = 14;
	std::size_t channels = 1;
	std::size_t filters = 1;
	std::size_t batch = 1;
	std::vector<Precision> precisions { Precision::binary32 };
	std::vector<std::uint64_t> seeds { 1 };

	/// "Same" padding: (r - 1) / 2 before, the rest after.
	ConvSpec spec() const;
};

struct AccuracyRow
{
	std::size_t config_index = 0;
	std::size_t kernel = 0;
	std::size_t stride = 0;
	std::size_t hw = 0;
	std::size_t channels = 0;
	std::size_t filters = 0;
	Algorithm algorithm = Algorithm::direct;
	Precision precision = Precision::binary64;
	std::uint64_t seed = 0;
	/// Empty when the algorithm produced a non-finite value.
	std::optional<double> mse;

	bool overflow() const noexcept
	{
		return !mse.has_value();
	}
	/// log10(mse) + 10, defined only for mse > 0.
	std::optional<double> log_scaled() const;
};

struct AccuracyReport
{
	std::vector<AccuracyRow> rows;
};

/// For each config and seed, draws N(0,1) input then weights (NormalGenerator),
/// computes the binary64 direct reference and reports the MSE of every
/// applicable algorithm in every requested precision. Classic Winograd is
/// skipped for strided configs.
AccuracyReport run_accuracy_suite(const std::vector<AccuracyConfig> &configs);

/// Same, with `seeds` replacing every config's seed list.
AccuracyReport run_accuracy_suite(std::vector<AccuracyConfig> configs, const std::vector<std::uint64_t> &seeds);

std::string accuracy_csv(const AccuracyReport &report);
nlohmann::json accuracy_json(const AccuracyReport &report);

struct BandCheck
{
	std::string name;
	bool passed = true;
	std::string detail;
};

namespace bands {
constexpr double dwm_f32_max_mse = 1e-7;
constexpr double winograd_f32_min_mse = 1e-4;
constexpr std::size_t winograd_large_kernel = 7;
constexpr double dwm_f64_max_mse = 1e-20;
constexpr double dwm_vs_direct_f32_decades = 2.0;
}

/// Accuracy acceptance bands:
///  - binary64 direct has zero error, binary64 DWM stays <= 1e-20
///  - binary32 DWM MSE <= 1e-7
///  - binary32 classic Winograd MSE >= 1e-4 for kernels >= 7
///  - binary32 classic Winograd MSE non-decreasing in kernel size (same data dims and seed)
///  - binary32 DWM within two decades of binary32 direct
/// Overflow rows fail the DWM and direct bands and count as infinite error for classic Winograd.
std::vector<BandCheck> check_accuracy_bands(const AccuracyReport &report);

// ---------------------------------------------------------------- flops

struct FlopReference
{
	std::optional<std::uint64_t> direct;
	std::optional<std::uint64_t> dwm;
	std::optional<std::string> dwm_speedup;
	std::optional<std::string> winograd_speedup;
	/// True when the reference marks classic Winograd as not applicable.
	bool winograd_na = false;
	/// Printed value from the published table (informational only).
	std::optional<std::string> published_winograd;
};

struct FlopSuiteEntry
{
	FlopConfig config;
	std::optional<FlopReference> reference;
};

std::vector<FlopReport> run_flops_suite(const std::vector<FlopSuiteEntry> &entries);

nlohmann::json flops_json(const std::vector<FlopSuiteEntry> &entries, const std::vector<FlopReport> &reports);

/// Exact direct and DWM counts, speedups to two decimals and N/A placement.
std::vector<BandCheck> check_flop_references(const std::vector<FlopSuiteEntry> &entries, const std::vector<FlopReport> &reports);

// ---------------------------------------------------------------- configs

struct BenchConfig
{
	std::string suite; ///< "flops" or "accuracy"
	std::vector<FlopSuiteEntry> flops;
	std::vector<AccuracyConfig> accuracy;
};

/// Parses {"schema": 1, "suite": ..., "configs": [...]}; errors name the offending entry.
BenchConfig parse_bench_config(const nlohmann::json &doc);

// ---------------------------------------------------------------- networks

struct LayerSpec
{
	std::string name;
	std::size_t in_channels = 0;
	std::size_t out_channels = 0;
	ConvSpec conv;
	Index2 input;
};

struct NetworkSpec
{
	std::string name;
	std::vector<LayerSpec> layers;
};

struct LayerReport
{
	std::string name;
	ConvSpec conv;
	Index2 out;
	std::uint64_t direct = 0;
	/// Empty when classic Winograd is not applicable (stride > 1).
	std::optional<std::uint64_t> winograd;
	std::uint64_t dwm = 0;
	bool accelerated = true; ///< false for 1x1 layers
};

struct NetworkReport
{
	std::string name;
	std::vector<LayerReport> layers;
	std::uint64_t total_direct = 0;
	/// Layers where Winograd is not applicable contribute their direct count.
	std::uint64_t total_winograd = 0;
	std::uint64_t total_dwm = 0;
};

NetworkSpec parse_network(const nlohmann::json &doc);

/// Multiplications per input image, scaled by in_channels * out_channels per layer.
NetworkReport analyze_network(const NetworkSpec &net);

std::string network_csv(const NetworkReport &report);
nlohmann::json network_json(const NetworkReport &report);

} // namespace dwm
