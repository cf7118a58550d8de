#pragma once

#include <dwm/conv_spec.hpp>
#include <dwm/decompose.hpp>
#include <dwm/tensor.hpp>
#include <dwm/transform.hpp>

#include <cstdint>

namespace dwm {

/*
 * Convolution engines. All of them compute cross-correlation:
 *
 *   Y[n,f,oy,ox] = sum_{c,ky,kx} g[f,c,ky,kx] * d_pad[n,c, oy*s_h + ky, ox*s_w + kx]
 *
 * Inputs are N x C x H x W, weights F x C x r_h x r_w. Weights always stay in the
 * spatial domain; Winograd-domain weights are recomputed inside each call.
 *
 * Instantiated for float, double and Rational.
 */

template<typename T>
struct ConvOutput
{
	Tensor4<T> y;
	/// Multiplications actually performed in the element-wise (calculation) stage.
	std::uint64_t flops = 0;
};

template<typename T>
struct Gradients
{
	Tensor4<T> data;
	Tensor4<T> weight;
};

/// Reference engine. Summation order: c ascending, then ky, then kx.
template<typename T>
ConvOutput<T> direct_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec);

/// Tiled F(m, r) Winograd, stride 1 only. Uses F(2, r_h) x F(2, r_w) built from default points.
template<typename T>
ConvOutput<T> winograd_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec);

/// Same with explicit row/col transforms (rows.r == r_h, cols.r == r_w, rows.m == cols.m).
template<typename T>
ConvOutput<T> winograd_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec, const NumericTransform<T> &rows,
		const NumericTransform<T> &cols);

/// Splitting, transformation, calculation, detransformation and aggregation over `plan`.
template<typename T>
ConvOutput<T> dwm_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec, const DecompositionPlan &plan);

/// Gradient w.r.t. the (unpadded) input of winograd_conv2d; `input` gives N, H, W.
template<typename T>
Tensor4<T> winograd_grad_data(const Tensor4<T> &dY, const Tensor4<T> &g, const ConvSpec &spec, const Dims4 &input);

/// Gradient w.r.t. the weights of winograd_conv2d, summed over tiles and batch.
template<typename T>
Tensor4<T> winograd_grad_weight(const Tensor4<T> &dY, const Tensor4<T> &d, const ConvSpec &spec, Index2 kernel);

/// Every part receives the same dY; input gradients are summed through each part's
/// strided slice in plan order, weight gradients are placed into each part's taps.
template<typename T>
Gradients<T> dwm_backward(const Tensor4<T> &dY, const DecompositionPlan &plan, const Tensor4<T> &d, const Tensor4<T> &g);

/// Strided gather of one part's taps from the full kernel.
template<typename T>
Tensor4<T> gather_kernel_part(const Tensor4<T> &g, const KernelPart &part);

} // namespace dwm
