#pragma once

#include <dwm/tensor.hpp>

#include <filesystem>
#include <iosfwd>
#include <variant>

namespace dwm {

/*
 * Tensor container:
 *   bytes 0..3   magic "DWM1"
 *   u32          rank (always 4)
 *   4 x u32      dims N, C, H, W
 *   u8           precision tag (0 = binary32, 1 = binary64)
 *   elements     little-endian, row-major N,C,H,W
 */

using AnyTensor = std::variant<Tensor4<float>, Tensor4<double>>;

class FormatError : public std::runtime_error
{
	public:
		using std::runtime_error::runtime_error;
};

void write_tensor(std::ostream &stream, const AnyTensor &tensor);
AnyTensor read_tensor(std::istream &stream);

void write_tensor_file(const std::filesystem::path &path, const AnyTensor &tensor);
AnyTensor read_tensor_file(const std::filesystem::path &path);

Precision precision_of_tensor(const AnyTensor &tensor);

template<typename T>
Tensor4<T> as_precision(const AnyTensor &tensor)
{
	return std::visit([](const auto &t)
	{	return tensor_cast<T>(t);}, tensor);
}

} // namespace dwm
