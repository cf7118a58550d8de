#include <dwm/conv.hpp>

#include <cassert>
#include <stdexcept>
#include <vector>

namespace dwm {

namespace {

/// out (a x d) = left (a x b) * x (b x c) * right^T, with right (d x c).
/// Each stage is rounded to T.
template<typename T>
void sandwich(const Matrix<T> &left, const T *x, const Matrix<T> &right, T *out, std::vector<T> &scratch)
{
	const std::size_t a = left.rows();
	const std::size_t b = left.cols();
	const std::size_t c = right.cols();
	const std::size_t d = right.rows();
	scratch.assign(a * c, T(0));
	for (std::size_t i = 0; i < a; i++)
		for (std::size_t j = 0; j < c; j++)
		{
			T sum = T(0);
			for (std::size_t k = 0; k < b; k++)
				sum += left(i, k) * x[k * c + j];
			scratch[i * c + j] = sum;
		}
	for (std::size_t i = 0; i < a; i++)
		for (std::size_t j = 0; j < d; j++)
		{
			T sum = T(0);
			for (std::size_t k = 0; k < c; k++)
				sum += scratch[i * c + k] * right(j, k);
			out[i * d + j] = sum;
		}
}

std::size_t ceil_div(std::size_t a, std::size_t b)
{
	return (a + b - 1) / b;
}

/// Tile geometry of a stride-1 convolution computed with rows x cols transforms.
template<typename T>
struct Tiling
{
	const NumericTransform<T> &rows;
	const NumericTransform<T> &cols;
	std::size_t mh, mw, lh, lw;
	std::size_t out_h, out_w;
	std::size_t tiles_h, tiles_w;

	Tiling(const NumericTransform<T> &rows, const NumericTransform<T> &cols, Index2 out) :
			rows(rows),
			cols(cols),
			mh(rows.m),
			mw(cols.m),
			lh(rows.l()),
			lw(cols.l()),
			out_h(out.row),
			out_w(out.col),
			tiles_h(ceil_div(out.row, rows.m)),
			tiles_w(ceil_div(out.col, cols.m))
	{
	}
	std::size_t tiles() const noexcept
	{
		return tiles_h * tiles_w;
	}
	std::size_t tile_size() const noexcept
	{
		return lh * lw;
	}
};

/// Winograd-domain weights, layout [f][c][lh*lw].
template<typename T>
std::vector<T> transform_weights(const Tensor4<T> &g, const Tiling<T> &t)
{
	const Dims4 &dims = g.dims();
	const std::size_t L = t.tile_size();
	std::vector<T> result(dims.n * dims.c * L);
	std::vector<T> scratch;
	for (std::size_t f = 0; f < dims.n; f++)
		for (std::size_t c = 0; c < dims.c; c++)
			sandwich(t.rows.G, &g(f, c, 0, 0), t.cols.G, &result[(f * dims.c + c) * L], scratch);
	return result;
}

/// Winograd-domain input tiles, layout [n][tile][c][lh*lw]. Samples past the
/// input extent read as zero (odd output extents).
template<typename T>
std::vector<T> transform_input(const Tensor4<T> &dp, const Tiling<T> &t)
{
	const Dims4 &dims = dp.dims();
	const std::size_t L = t.tile_size();
	std::vector<T> result(dims.n * t.tiles() * dims.c * L);
	std::vector<T> window(L);
	std::vector<T> scratch;
	for (std::size_t n = 0; n < dims.n; n++)
		for (std::size_t ty = 0; ty < t.tiles_h; ty++)
			for (std::size_t tx = 0; tx < t.tiles_w; tx++)
			{
				const std::size_t tile = ty * t.tiles_w + tx;
				for (std::size_t c = 0; c < dims.c; c++)
				{
					for (std::size_t i = 0; i < t.lh; i++)
						for (std::size_t j = 0; j < t.lw; j++)
						{
							const std::size_t y = ty * t.mh + i;
							const std::size_t x = tx * t.mw + j;
							window[i * t.lw + j] = (y < dims.h && x < dims.w) ? dp(n, c, y, x) : T(0);
						}
					sandwich(t.rows.B_t, window.data(), t.cols.B_t, &result[((n * t.tiles() + tile) * dims.c + c) * L], scratch);
				}
			}
	return result;
}

/// Output gradients mapped into the Winograd domain (A_t^T dY A_t), layout [n][tile][f][lh*lw].
template<typename T>
std::vector<T> transform_output_grad(const Tensor4<T> &dY, const Tiling<T> &t)
{
	const Dims4 &dims = dY.dims();
	const std::size_t L = t.tile_size();
	const Matrix<T> Ar = transpose(t.rows.A_t);
	const Matrix<T> Ac = transpose(t.cols.A_t);
	std::vector<T> result(dims.n * t.tiles() * dims.c * L);
	std::vector<T> tile_grad(t.mh * t.mw);
	std::vector<T> scratch;
	for (std::size_t n = 0; n < dims.n; n++)
		for (std::size_t ty = 0; ty < t.tiles_h; ty++)
			for (std::size_t tx = 0; tx < t.tiles_w; tx++)
			{
				const std::size_t tile = ty * t.tiles_w + tx;
				for (std::size_t f = 0; f < dims.c; f++)
				{
					for (std::size_t i = 0; i < t.mh; i++)
						for (std::size_t j = 0; j < t.mw; j++)
						{
							const std::size_t y = ty * t.mh + i;
							const std::size_t x = tx * t.mw + j;
							tile_grad[i * t.mw + j] = (y < t.out_h && x < t.out_w) ? dY(n, f, y, x) : T(0);
						}
					sandwich(Ar, tile_grad.data(), Ac, &result[((n * t.tiles() + tile) * dims.c + f) * L], scratch);
				}
			}
	return result;
}

template<typename T>
ConvOutput<T> winograd_forward_core(const Tensor4<T> &dp, const Tensor4<T> &g, const NumericTransform<T> &rows, const NumericTransform<T> &cols,
		Index2 out)
{
	const Tiling<T> t(rows, cols, out);
	const std::size_t N = dp.dims().n;
	const std::size_t C = dp.dims().c;
	const std::size_t F = g.dims().n;
	const std::size_t L = t.tile_size();
	assert(dp.dims().h + 1 >= out.row + g.dims().h && dp.dims().w + 1 >= out.col + g.dims().w);

	const std::vector<T> U = transform_weights(g, t);
	const std::vector<T> V = transform_input(dp, t);

	ConvOutput<T> result { Tensor4<T>(Dims4 { N, F, out.row, out.col }), 0 };
	std::vector<T> acc(L);
	std::vector<T> tile_out(t.mh * t.mw);
	std::vector<T> scratch;
	for (std::size_t n = 0; n < N; n++)
		for (std::size_t f = 0; f < F; f++)
			for (std::size_t ty = 0; ty < t.tiles_h; ty++)
				for (std::size_t tx = 0; tx < t.tiles_w; tx++)
				{
					const std::size_t tile = ty * t.tiles_w + tx;
					acc.assign(L, T(0));
					for (std::size_t c = 0; c < C; c++)
					{
						const T *u = &U[(f * C + c) * L];
						const T *v = &V[((n * t.tiles() + tile) * C + c) * L];
						for (std::size_t k = 0; k < L; k++)
							acc[k] += u[k] * v[k];
					}
					sandwich(rows.A_t, acc.data(), cols.A_t, tile_out.data(), scratch);
					for (std::size_t i = 0; i < t.mh; i++)
						for (std::size_t j = 0; j < t.mw; j++)
						{
							const std::size_t y = ty * t.mh + i;
							const std::size_t x = tx * t.mw + j;
							if (y < out.row && x < out.col)
								result.y(n, f, y, x) = tile_out[i * t.mw + j];
						}
				}
	result.flops = static_cast<std::uint64_t>(N) * F * C * t.tiles() * L;
	return result;
}

/// Gradient w.r.t. the padded input `padded` (dims only) of winograd_forward_core.
template<typename T>
Tensor4<T> winograd_grad_data_core(const Tensor4<T> &dY, const Tensor4<T> &g, const NumericTransform<T> &rows, const NumericTransform<T> &cols,
		const Dims4 &padded)
{
	const Tiling<T> t(rows, cols, Index2 { dY.dims().h, dY.dims().w });
	const std::size_t N = padded.n;
	const std::size_t C = padded.c;
	const std::size_t F = g.dims().n;
	const std::size_t L = t.tile_size();

	const std::vector<T> U = transform_weights(g, t);
	const std::vector<T> W = transform_output_grad(dY, t);
	const Matrix<T> Br = transpose(rows.B_t);
	const Matrix<T> Bc = transpose(cols.B_t);

	Tensor4<T> grad(padded);
	std::vector<T> acc(L);
	std::vector<T> window(L);
	std::vector<T> scratch;
	for (std::size_t n = 0; n < N; n++)
		for (std::size_t c = 0; c < C; c++)
			for (std::size_t ty = 0; ty < t.tiles_h; ty++)
				for (std::size_t tx = 0; tx < t.tiles_w; tx++)
				{
					const std::size_t tile = ty * t.tiles_w + tx;
					acc.assign(L, T(0));
					for (std::size_t f = 0; f < F; f++)
					{
						const T *u = &U[(f * C + c) * L];
						const T *w = &W[((n * t.tiles() + tile) * F + f) * L];
						for (std::size_t k = 0; k < L; k++)
							acc[k] += u[k] * w[k];
					}
					sandwich(Br, acc.data(), Bc, window.data(), scratch);
					for (std::size_t i = 0; i < t.lh; i++)
						for (std::size_t j = 0; j < t.lw; j++)
						{
							const std::size_t y = ty * t.mh + i;
							const std::size_t x = tx * t.mw + j;
							if (y < padded.h && x < padded.w)
								grad(n, c, y, x) += window[i * t.lw + j];
						}
				}
	return grad;
}

/// Gradient w.r.t. the weights of winograd_forward_core on padded input `dp`.
template<typename T>
Tensor4<T> winograd_grad_weight_core(const Tensor4<T> &dY, const Tensor4<T> &dp, const NumericTransform<T> &rows, const NumericTransform<T> &cols)
{
	const Tiling<T> t(rows, cols, Index2 { dY.dims().h, dY.dims().w });
	const std::size_t N = dp.dims().n;
	const std::size_t C = dp.dims().c;
	const std::size_t F = dY.dims().c;
	const std::size_t L = t.tile_size();

	const std::vector<T> V = transform_input(dp, t);
	const std::vector<T> W = transform_output_grad(dY, t);
	const Matrix<T> Gr = transpose(rows.G);
	const Matrix<T> Gc = transpose(cols.G);

	Tensor4<T> grad(Dims4 { F, C, static_cast<std::size_t>(rows.r), static_cast<std::size_t>(cols.r) });
	std::vector<T> acc(L);
	std::vector<T> scratch;
	for (std::size_t f = 0; f < F; f++)
		for (std::size_t c = 0; c < C; c++)
		{
			acc.assign(L, T(0));
			for (std::size_t n = 0; n < N; n++)
				for (std::size_t tile = 0; tile < t.tiles(); tile++)
				{
					const T *w = &W[((n * t.tiles() + tile) * F + f) * L];
					const T *v = &V[((n * t.tiles() + tile) * C + c) * L];
					for (std::size_t k = 0; k < L; k++)
						acc[k] += w[k] * v[k];
				}
			sandwich(Gr, acc.data(), Gc, &grad(f, c, 0, 0), scratch);
		}
	return grad;
}

template<typename T>
void check_weights(const Dims4 &input, const Tensor4<T> &g, const ConvSpec &spec)
{
	if (g.dims().c != input.c)
		throw ShapeError("weights have " + std::to_string(g.dims().c) + " channels, input has " + std::to_string(input.c));
	if (g.dims().h != spec.kernel.row || g.dims().w != spec.kernel.col)
		throw ShapeError("weights " + to_string(g.dims()) + " do not match " + to_string(spec));
}

template<typename T>
void check_output_grad(const Tensor4<T> &dY, const Dims4 &input, std::size_t filters, const ConvSpec &spec)
{
	const Index2 out = spec.output_extent(input.h, input.w);
	const Dims4 expected { input.n, filters, out.row, out.col };
	if (dY.dims() != expected)
		throw ShapeError("output gradient " + to_string(dY.dims()) + " does not match forward output " + to_string(expected));
}

void require_stride_one(const ConvSpec &spec)
{
	if (spec.stride.row != 1 || spec.stride.col != 1)
		throw std::invalid_argument("winograd engine supports stride 1 only (" + to_string(spec) + "); use the dwm engine for strided convolution");
}

template<typename T>
void finish(const Tensor4<T> &t, const char *what)
{
	if constexpr (!std::is_same_v<T, Rational>)
		require_finite(t, what);
}

void check_plan(const DecompositionPlan &plan, const ConvSpec &spec)
{
	if (plan.spec.kernel != spec.kernel || plan.spec.stride != spec.stride)
		throw std::invalid_argument("decomposition plan for " + to_string(plan.spec) + " does not match " + to_string(spec));
}

template<typename T>
std::shared_ptr<const NumericTransform<T>> transform_of(const std::shared_ptr<const TransformSet> &exact, std::size_t taps)
{
	if (exact && exact->r != static_cast<int>(taps))
		throw std::invalid_argument("part transform does not match its tap count");
	return numeric_transform_for<T>(2, static_cast<int>(taps));
}

}

template<typename T>
Tensor4<T> gather_kernel_part(const Tensor4<T> &g, const KernelPart &part)
{
	const Dims4 &dims = g.dims();
	if (part.row.origin + part.row.step * (part.row.count - 1) >= dims.h || part.col.origin + part.col.step * (part.col.count - 1) >= dims.w)
		throw ShapeError("kernel part does not fit weights " + to_string(dims));
	Tensor4<T> result(Dims4 { dims.n, dims.c, part.row.count, part.col.count });
	for (std::size_t f = 0; f < dims.n; f++)
		for (std::size_t c = 0; c < dims.c; c++)
			for (std::size_t i = 0; i < part.row.count; i++)
				for (std::size_t j = 0; j < part.col.count; j++)
					result(f, c, i, j) = g(f, c, part.row.origin + part.row.step * i, part.col.origin + part.col.step * j);
	return result;
}

template<typename T>
ConvOutput<T> direct_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec)
{
	check_weights(d.dims(), g, spec);
	const Index2 out = spec.output_extent(d.dims().h, d.dims().w);
	const Tensor4<T> dp = pad_input(d, spec.pad);
	const std::size_t N = d.dims().n;
	const std::size_t C = d.dims().c;
	const std::size_t F = g.dims().n;
	const std::size_t rh = spec.kernel.row;
	const std::size_t rw = spec.kernel.col;

	ConvOutput<T> result { Tensor4<T>(Dims4 { N, F, out.row, out.col }), 0 };
	for (std::size_t n = 0; n < N; n++)
		for (std::size_t f = 0; f < F; f++)
			for (std::size_t oy = 0; oy < out.row; oy++)
				for (std::size_t ox = 0; ox < out.col; ox++)
				{
					T sum = T(0);
					for (std::size_t c = 0; c < C; c++)
					{
						const T *row0 = &dp(n, c, oy * spec.stride.row, ox * spec.stride.col);
						const T *w = &g(f, c, 0, 0);
						const std::size_t pitch = dp.dims().w;
						for (std::size_t ky = 0; ky < rh; ky++)
							for (std::size_t kx = 0; kx < rw; kx++)
								sum += w[ky * rw + kx] * row0[ky * pitch + kx];
					}
					result.y(n, f, oy, ox) = sum;
				}
	result.flops = static_cast<std::uint64_t>(N) * F * C * out.row * out.col * rh * rw;
	finish(result.y, "direct convolution");
	return result;
}

template<typename T>
ConvOutput<T> winograd_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec, const NumericTransform<T> &rows,
		const NumericTransform<T> &cols)
{
	require_stride_one(spec);
	check_weights(d.dims(), g, spec);
	if (rows.r != static_cast<int>(spec.kernel.row) || cols.r != static_cast<int>(spec.kernel.col))
		throw std::invalid_argument("transform tap counts do not match " + to_string(spec));
	const Index2 out = spec.output_extent(d.dims().h, d.dims().w);
	ConvOutput<T> result = winograd_forward_core(pad_input(d, spec.pad), g, rows, cols, out);
	finish(result.y, "winograd convolution");
	return result;
}

template<typename T>
ConvOutput<T> winograd_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec)
{
	require_stride_one(spec);
	const auto rows = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.row));
	const auto cols = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.col));
	return winograd_conv2d(d, g, spec, *rows, *cols);
}

template<typename T>
ConvOutput<T> dwm_conv2d(const Tensor4<T> &d, const Tensor4<T> &g, const ConvSpec &spec, const DecompositionPlan &plan)
{
	check_plan(plan, spec);
	check_weights(d.dims(), g, spec);
	const Index2 out = spec.output_extent(d.dims().h, d.dims().w);
	const Tensor4<T> dp = pad_input(d, spec.pad);

	ConvOutput<T> result;
	bool first = true;
	for (const KernelPart &part : plan.parts)
	{
		// splitting
		const SliceRegion region = input_region_for_part(plan, part, out);
		const Tensor4<T> slice = slice_strided(dp, region.origin, region.step, region.count);
		const Tensor4<T> weights = gather_kernel_part(g, part);
		// transformation, calculation, detransformation
		const auto rows = transform_of<T>(part.transform_rows, part.row.count);
		const auto cols = transform_of<T>(part.transform_cols, part.col.count);
		ConvOutput<T> partial = winograd_forward_core(slice, weights, *rows, *cols, out);
		// aggregation
		result.flops += partial.flops;
		if (first)
			result.y = std::move(partial.y);
		else
			accumulate_into(result.y, partial.y);
		first = false;
	}
	finish(result.y, "dwm convolution");
	return result;
}

template<typename T>
Tensor4<T> winograd_grad_data(const Tensor4<T> &dY, const Tensor4<T> &g, const ConvSpec &spec, const Dims4 &input)
{
	require_stride_one(spec);
	check_weights(input, g, spec);
	check_output_grad(dY, input, g.dims().n, spec);
	const auto rows = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.row));
	const auto cols = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.col));
	const Dims4 padded { input.n, input.c, input.h + spec.pad.top + spec.pad.bottom, input.w + spec.pad.left + spec.pad.right };
	const Tensor4<T> grad_padded = winograd_grad_data_core(dY, g, *rows, *cols, padded);
	Tensor4<T> grad = slice_strided(grad_padded, Index2 { spec.pad.top, spec.pad.left }, Index2 { 1, 1 }, Index2 { input.h, input.w });
	finish(grad, "winograd data gradient");
	return grad;
}

template<typename T>
Tensor4<T> winograd_grad_weight(const Tensor4<T> &dY, const Tensor4<T> &d, const ConvSpec &spec, Index2 kernel)
{
	require_stride_one(spec);
	if (kernel != spec.kernel)
		throw ShapeError("requested kernel extent does not match " + to_string(spec));
	if (dY.dims().n != d.dims().n)
		throw ShapeError("output gradient batch does not match input batch");
	check_output_grad(dY, d.dims(), dY.dims().c, spec);
	const auto rows = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.row));
	const auto cols = numeric_transform_for<T>(2, static_cast<int>(spec.kernel.col));
	Tensor4<T> grad = winograd_grad_weight_core(dY, pad_input(d, spec.pad), *rows, *cols);
	finish(grad, "winograd weight gradient");
	return grad;
}

template<typename T>
Gradients<T> dwm_backward(const Tensor4<T> &dY, const DecompositionPlan &plan, const Tensor4<T> &d, const Tensor4<T> &g)
{
	const ConvSpec &spec = plan.spec;
	check_weights(d.dims(), g, spec);
	check_output_grad(dY, d.dims(), g.dims().n, spec);
	const Index2 out { dY.dims().h, dY.dims().w };
	const Tensor4<T> dp = pad_input(d, spec.pad);

	Tensor4<T> grad_padded(dp.dims());
	Gradients<T> result { Tensor4<T>(), Tensor4<T>(g.dims()) };
	bool first = true;
	for (const KernelPart &part : plan.parts)
	{
		const SliceRegion region = input_region_for_part(plan, part, out);
		const Tensor4<T> slice = slice_strided(dp, region.origin, region.step, region.count);
		const Tensor4<T> weights = gather_kernel_part(g, part);
		const auto rows = transform_of<T>(part.transform_rows, part.row.count);
		const auto cols = transform_of<T>(part.transform_cols, part.col.count);

		const Tensor4<T> slice_grad = winograd_grad_data_core(dY, weights, *rows, *cols, slice.dims());
		const Dims4 &sd = slice.dims();
		for (std::size_t n = 0; n < sd.n; n++)
			for (std::size_t c = 0; c < sd.c; c++)
				for (std::size_t i = 0; i < sd.h; i++)
					for (std::size_t j = 0; j < sd.w; j++)
					{
						T &target = grad_padded(n, c, region.origin.row + region.step.row * i, region.origin.col + region.step.col * j);
						if (first)
							target = slice_grad(n, c, i, j);
						else
							target += slice_grad(n, c, i, j);
					}
		first = false;

		// parts are disjoint in the kernel, so weight gradients are placed, not summed
		const Tensor4<T> part_grad = winograd_grad_weight_core(dY, slice, *rows, *cols);
		for (std::size_t f = 0; f < g.dims().n; f++)
			for (std::size_t c = 0; c < g.dims().c; c++)
				for (std::size_t i = 0; i < part.row.count; i++)
					for (std::size_t j = 0; j < part.col.count; j++)
						result.weight(f, c, part.row.origin + part.row.step * i, part.col.origin + part.col.step * j) = part_grad(f, c, i, j);
	}
	result.data = slice_strided(grad_padded, Index2 { spec.pad.top, spec.pad.left }, Index2 { 1, 1 }, Index2 { d.dims().h, d.dims().w });
	finish(result.data, "dwm data gradient");
	finish(result.weight, "dwm weight gradient");
	return result;
}

#define DWM_INSTANTIATE(T) \
	template Tensor4<T> gather_kernel_part(const Tensor4<T>&, const KernelPart&); \
	template ConvOutput<T> direct_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&); \
	template ConvOutput<T> winograd_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&); \
	template ConvOutput<T> winograd_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&, const NumericTransform<T>&, \
			const NumericTransform<T>&); \
	template ConvOutput<T> dwm_conv2d(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&, const DecompositionPlan&); \
	template Tensor4<T> winograd_grad_data(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&, const Dims4&); \
	template Tensor4<T> winograd_grad_weight(const Tensor4<T>&, const Tensor4<T>&, const ConvSpec&, Index2); \
	template Gradients<T> dwm_backward(const Tensor4<T>&, const DecompositionPlan&, const Tensor4<T>&, const Tensor4<T>&);

DWM_INSTANTIATE(float)
DWM_INSTANTIATE(double)
DWM_INSTANTIATE(Rational)

#undef DWM_INSTANTIATE

} // namespace dwm
