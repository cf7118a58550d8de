#include <dwm/tensor_io.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace dwm {

namespace {

constexpr char magic[4] = { 'D', 'W', 'M', '1' };

template<typename U>
void put_le(std::ostream &stream, U value)
{
	unsigned char bytes[sizeof(U)];
	for (std::size_t i = 0; i < sizeof(U); i++)
		bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
	stream.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template<typename U>
U get_le(std::istream &stream)
{
	unsigned char bytes[sizeof(U)];
	if (!stream.read(reinterpret_cast<char*>(bytes), sizeof(U)))
		throw FormatError("tensor file is truncated");
	U value = 0;
	for (std::size_t i = 0; i < sizeof(U); i++)
		value |= static_cast<U>(bytes[i]) << (8 * i);
	return value;
}

template<typename T>
void write_elements(std::ostream &stream, const Tensor4<T> &t)
{
	using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
	for (T x : t.data())
		put_le(stream, std::bit_cast<Bits>(x));
}

template<typename T>
Tensor4<T> read_elements(std::istream &stream, const Dims4 &dims)
{
	using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
	std::vector<T> data(dims.count());
	for (T &x : data)
		x = std::bit_cast<T>(get_le<Bits>(stream));
	return Tensor4<T>(dims, std::move(data));
}

}

Precision precision_of_tensor(const AnyTensor &tensor)
{
	return std::holds_alternative<Tensor4<float>>(tensor) ? Precision::binary32 : Precision::binary64;
}

void write_tensor(std::ostream &stream, const AnyTensor &tensor)
{
	stream.write(magic, sizeof(magic));
	std::visit([&](const auto &t)
	{
		const Dims4 &d = t.dims();
		put_le<std::uint32_t>(stream, 4);
		for (std::size_t extent : { d.n, d.c, d.h, d.w })
			put_le<std::uint32_t>(stream, static_cast<std::uint32_t>(extent));
		put_le<std::uint8_t>(stream, precision_of_tensor(tensor) == Precision::binary32 ? 0 : 1);
		write_elements(stream, t);
	}, tensor);
	if (!stream)
		throw FormatError("failed to write tensor");
}

AnyTensor read_tensor(std::istream &stream)
{
	char header[4];
	if (!stream.read(header, sizeof(header)) || std::memcmp(header, magic, sizeof(magic)) != 0)
		throw FormatError("not a DWM1 tensor file (bad magic)");
	const std::uint32_t rank = get_le<std::uint32_t>(stream);
	if (rank != 4)
		throw FormatError("unsupported tensor rank " + std::to_string(rank));
	Dims4 dims;
	dims.n = get_le<std::uint32_t>(stream);
	dims.c = get_le<std::uint32_t>(stream);
	dims.h = get_le<std::uint32_t>(stream);
	dims.w = get_le<std::uint32_t>(stream);
	const std::uint8_t tag = get_le<std::uint8_t>(stream);
	AnyTensor result;
	if (tag == 0)
		result = read_elements<float>(stream, dims);
	else if (tag == 1)
		result = read_elements<double>(stream, dims);
	else
		throw FormatError("unknown precision tag " + std::to_string(tag));
	if (stream.peek() != std::char_traits<char>::eof())
		throw FormatError("trailing bytes after tensor data");
	return result;
}

void write_tensor_file(const std::filesystem::path &path, const AnyTensor &tensor)
{
	std::ofstream stream(path, std::ios::binary | std::ios::trunc);
	if (!stream)
		throw FormatError("cannot open " + path.string() + " for writing");
	write_tensor(stream, tensor);
}

AnyTensor read_tensor_file(const std::filesystem::path &path)
{
	std::ifstream stream(path, std::ios::binary);
	if (!stream)
		throw FormatError("cannot open " + path.string());
	return read_tensor(stream);
}

} // namespace dwm
