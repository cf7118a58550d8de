#pragma once

#include <dwm/conv_spec.hpp>
#include <dwm/tensor.hpp>

#include <functional>
#include <vector>

namespace oracle {

using dwm::ConvSpec;
using dwm::Tensor4;

/// Literal loops over every output, channel and tap; samples outside the input read as zero.
Tensor4<double> oracle_conv(const Tensor4<double> &d, const Tensor4<double> &g, const ConvSpec &spec);

/// y[k] = sum_i g[i] * d[k + i] for every k with a full window.
std::vector<double> correlate1d(const std::vector<double> &g, const std::vector<double> &d);

struct Grads
{
	Tensor4<double> data;
	Tensor4<double> weight;
};

/// Chain rule on oracle_conv for the loss sum(dY * Y).
Grads oracle_grads(const Tensor4<double> &d, const Tensor4<double> &g, const ConvSpec &spec, const Tensor4<double> &dY);

/// Central differences of sum(dY * oracle_conv(d, g)) with step h, one element at a time.
Grads finite_difference(const Tensor4<double> &d, const Tensor4<double> &g, const ConvSpec &spec, const Tensor4<double> &dY, double h);

/// max |a - b| / max(max |b|, 1e-300)
double relative_error(const Tensor4<double> &a, const Tensor4<double> &b);

Tensor4<double> random_tensor(dwm::Dims4 dims, unsigned seed);

}
