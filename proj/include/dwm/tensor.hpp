#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace dwm {

enum class Precision
{
	binary32,
	binary64
};

std::string to_string(Precision p);
Precision parse_precision(const std::string &text);

template<typename T>
struct precision_of;
template<>
struct precision_of<float>
{
	static constexpr Precision value = Precision::binary32;
};
template<>
struct precision_of<double>
{
	static constexpr Precision value = Precision::binary64;
};

class ShapeError : public std::invalid_argument
{
	public:
		using std::invalid_argument::invalid_argument;
};

class BoundsError : public std::out_of_range
{
	public:
		using std::out_of_range::out_of_range;
};

class NonFiniteError : public std::runtime_error
{
	public:
		using std::runtime_error::runtime_error;
};

struct Dims4
{
	std::size_t n = 0;
	std::size_t c = 0;
	std::size_t h = 0;
	std::size_t w = 0;

	std::size_t count() const noexcept
	{
		return n * c * h * w;
	}
	bool operator==(const Dims4 &) const = default;
};

std::string to_string(const Dims4 &d);

struct Padding
{
	std::size_t top = 0;
	std::size_t bottom = 0;
	std::size_t left = 0;
	std::size_t right = 0;

	bool operator==(const Padding &) const = default;
};

struct Index2
{
	std::size_t row = 0;
	std::size_t col = 0;

	bool operator==(const Index2 &) const = default;
};

/// Dense N,C,H,W tensor, row-major with W contiguous.
template<typename T>
class Tensor4
{
	public:
		using value_type = T;

		Tensor4() = default;
		explicit Tensor4(Dims4 dims) :
				m_dims(dims),
				m_data(dims.count(), T(0))
		{
		}
		Tensor4(Dims4 dims, std::vector<T> data) :
				m_dims(dims),
				m_data(std::move(data))
		{
			if (m_data.size() != m_dims.count())
				throw ShapeError("tensor data has " + std::to_string(m_data.size()) + " elements, dims " + to_string(dims) + " need "
						+ std::to_string(dims.count()));
		}

		const Dims4& dims() const noexcept
		{
			return m_dims;
		}
		std::size_t size() const noexcept
		{
			return m_data.size();
		}
		std::span<const T> data() const noexcept
		{
			return m_data;
		}
		std::span<T> data() noexcept
		{
			return m_data;
		}

		std::size_t offset(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const noexcept
		{
			return ((n * m_dims.c + c) * m_dims.h + h) * m_dims.w + w;
		}
		const T& operator()(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const noexcept
		{
			return m_data[offset(n, c, h, w)];
		}
		T& operator()(std::size_t n, std::size_t c, std::size_t h, std::size_t w) noexcept
		{
			return m_data[offset(n, c, h, w)];
		}
		const T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const
		{
			check_index(n, c, h, w);
			return m_data[offset(n, c, h, w)];
		}
		T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w)
		{
			check_index(n, c, h, w);
			return m_data[offset(n, c, h, w)];
		}

		bool operator==(const Tensor4 &) const = default;

	private:
		void check_index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const
		{
			if (n >= m_dims.n || c >= m_dims.c || h >= m_dims.h || w >= m_dims.w)
				throw BoundsError("index out of range for tensor " + to_string(m_dims));
		}

		Dims4 m_dims;
		std::vector<T> m_data;
};

inline bool is_finite_value(float x) noexcept
{
	return std::isfinite(x);
}
inline bool is_finite_value(double x) noexcept
{
	return std::isfinite(x);
}
/// Exact scalar types (e.g. Rational) are always finite.
template<typename T>
constexpr bool is_finite_value(const T&) noexcept
{
	return true;
}

template<typename T>
bool all_finite(const Tensor4<T> &t) noexcept
{
	for (const T &x : t.data())
		if (!is_finite_value(x))
			return false;
	return true;
}

/// Throws NonFiniteError naming `what` when any element is NaN or infinite.
template<typename T>
void require_finite(const Tensor4<T> &t, const std::string &what)
{
	if (!all_finite(t))
		throw NonFiniteError(what + " produced a non-finite value");
}

template<typename T>
Tensor4<T> pad_input(const Tensor4<T> &d, const Padding &pad)
{
	const Dims4 &in = d.dims();
	Tensor4<T> out(Dims4 { in.n, in.c, in.h + pad.top + pad.bottom, in.w + pad.left + pad.right });
	for (std::size_t n = 0; n < in.n; n++)
		for (std::size_t c = 0; c < in.c; c++)
			for (std::size_t h = 0; h < in.h; h++)
				for (std::size_t w = 0; w < in.w; w++)
					out(n, c, h + pad.top, w + pad.left) = d(n, c, h, w);
	return out;
}

/// output[n,c,i,j] = input[n,c, origin.row + i*step.row, origin.col + j*step.col]
template<typename T>
Tensor4<T> slice_strided(const Tensor4<T> &d, Index2 origin, Index2 step, Index2 count)
{
	const Dims4 &in = d.dims();
	auto check_axis = [](const char *axis, std::size_t origin, std::size_t step, std::size_t count, std::size_t extent)
	{
		if (step == 0)
			throw BoundsError(std::string("slice step is zero on ") + axis + " axis");
		if (count == 0)
			return;
		const std::size_t last = origin + step * (count - 1);
		if (last >= extent)
			throw BoundsError(std::string("slice samples index ") + std::to_string(last) + " on " + axis + " axis of extent "
					+ std::to_string(extent));
	};
	check_axis("row", origin.row, step.row, count.row, in.h);
	check_axis("col", origin.col, step.col, count.col, in.w);

	Tensor4<T> out(Dims4 { in.n, in.c, count.row, count.col });
	for (std::size_t n = 0; n < in.n; n++)
		for (std::size_t c = 0; c < in.c; c++)
			for (std::size_t i = 0; i < count.row; i++)
				for (std::size_t j = 0; j < count.col; j++)
					out(n, c, i, j) = d(n, c, origin.row + i * step.row, origin.col + j * step.col);
	return out;
}

/// acc += addend, element by element in storage order.
template<typename T>
void accumulate_into(Tensor4<T> &acc, const Tensor4<T> &addend)
{
	if (acc.dims() != addend.dims())
		throw ShapeError("accumulate: dims " + to_string(acc.dims()) + " vs " + to_string(addend.dims()));
	std::span<T> a = acc.data();
	std::span<const T> b = addend.data();
	for (std::size_t i = 0; i < a.size(); i++)
		a[i] += b[i];
}

template<typename T>
Tensor4<T> accumulate(Tensor4<T> acc, const Tensor4<T> &addend)
{
	accumulate_into(acc, addend);
	return acc;
}

/// Mean squared difference against a binary64 reference, accumulated in binary64.
template<typename T>
double mse(const Tensor4<T> &x, const Tensor4<double> &reference)
{
	if (x.dims() != reference.dims())
		throw ShapeError("mse: dims " + to_string(x.dims()) + " vs " + to_string(reference.dims()));
	if (x.size() == 0)
		return 0.0;
	double sum = 0.0;
	std::span<const T> a = x.data();
	std::span<const double> b = reference.data();
	for (std::size_t i = 0; i < a.size(); i++)
	{
		const double diff = static_cast<double>(a[i]) - b[i];
		sum += diff * diff;
	}
	return sum / static_cast<double>(a.size());
}

template<typename T>
double max_abs_diff(const Tensor4<T> &x, const Tensor4<T> &y)
{
	if (x.dims() != y.dims())
		throw ShapeError("max_abs_diff: dims " + to_string(x.dims()) + " vs " + to_string(y.dims()));
	double result = 0.0;
	for (std::size_t i = 0; i < x.size(); i++)
		result = std::max(result, std::abs(static_cast<double>(x.data()[i]) - static_cast<double>(y.data()[i])));
	return result;
}

template<typename U, typename T>
Tensor4<U> tensor_cast(const Tensor4<T> &t)
{
	std::vector<U> data;
	data.reserve(t.size());
	for (const T &x : t.data())
		data.push_back(static_cast<U>(x));
	return Tensor4<U>(t.dims(), std::move(data));
}

} // namespace dwm
