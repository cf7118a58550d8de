#include <dwm/tensor.hpp>

namespace dwm {

std::string to_string(Precision p)
{
	switch (p)
	{
		case Precision::binary32:
			return "f32";
		case Precision::binary64:
			return "f64";
	}
	return "?";
}

Precision parse_precision(const std::string &text)
{
	if (text == "f32" || text == "binary32" || text == "float32")
		return Precision::binary32;
	if (text == "f64" || text == "binary64" || text == "float64")
		return Precision::binary64;
	throw std::invalid_argument("unknown precision '" + text + "' (expected f32 or f64)");
}

std::string to_string(const Dims4 &d)
{
	return std::to_string(d.n) + "x" + std::to_string(d.c) + "x" + std::to_string(d.h) + "x" + std::to_string(d.w);
}

} // namespace dwm
