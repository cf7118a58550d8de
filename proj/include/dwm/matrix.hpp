#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace dwm {

/// Small dense row-major matrix, used for transform matrices and tile arithmetic.
template<typename T>
class Matrix
{
	public:
		Matrix() = default;
		Matrix(std::size_t rows, std::size_t cols) :
				m_rows(rows),
				m_cols(cols),
				m_data(rows * cols, T(0))
		{
		}
		Matrix(std::initializer_list<std::initializer_list<T>> rows) :
				m_rows(rows.size()),
				m_cols(rows.size() == 0 ? 0 : rows.begin()->size())
		{
			m_data.reserve(m_rows * m_cols);
			for (const auto &row : rows)
			{
				if (row.size() != m_cols)
					throw std::invalid_argument("ragged matrix initializer");
				m_data.insert(m_data.end(), row.begin(), row.end());
			}
		}

		std::size_t rows() const noexcept
		{
			return m_rows;
		}
		std::size_t cols() const noexcept
		{
			return m_cols;
		}
		const T& operator()(std::size_t row, std::size_t col) const noexcept
		{
			assert(row < m_rows && col < m_cols);
			return m_data[row * m_cols + col];
		}
		T& operator()(std::size_t row, std::size_t col) noexcept
		{
			assert(row < m_rows && col < m_cols);
			return m_data[row * m_cols + col];
		}
		const std::vector<T>& data() const noexcept
		{
			return m_data;
		}

		bool operator==(const Matrix &) const = default;

	private:
		std::size_t m_rows = 0;
		std::size_t m_cols = 0;
		std::vector<T> m_data;
};

template<typename T>
Matrix<T> transpose(const Matrix<T> &a)
{
	Matrix<T> result(a.cols(), a.rows());
	for (std::size_t i = 0; i < a.rows(); i++)
		for (std::size_t j = 0; j < a.cols(); j++)
			result(j, i) = a(i, j);
	return result;
}

/// Plain triple loop, k ascending.
template<typename T>
Matrix<T> multiply(const Matrix<T> &a, const Matrix<T> &b)
{
	if (a.cols() != b.rows())
		throw std::invalid_argument("matrix multiply: inner dimensions differ");
	Matrix<T> result(a.rows(), b.cols());
	for (std::size_t i = 0; i < a.rows(); i++)
		for (std::size_t j = 0; j < b.cols(); j++)
		{
			T sum = T(0);
			for (std::size_t k = 0; k < a.cols(); k++)
				sum += a(i, k) * b(k, j);
			result(i, j) = sum;
		}
	return result;
}

template<typename T>
std::vector<T> multiply(const Matrix<T> &a, const std::vector<T> &x)
{
	if (a.cols() != x.size())
		throw std::invalid_argument("matrix-vector multiply: dimensions differ");
	std::vector<T> result(a.rows(), T(0));
	for (std::size_t i = 0; i < a.rows(); i++)
	{
		T sum = T(0);
		for (std::size_t k = 0; k < a.cols(); k++)
			sum += a(i, k) * x[k];
		result[i] = sum;
	}
	return result;
}

} // namespace dwm
