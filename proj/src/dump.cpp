#include <dwm/dump.hpp>

namespace dwm {

using nlohmann::json;

namespace {

json matrix_json(const Matrix<Rational> &m)
{
	json rows = json::array();
	for (std::size_t i = 0; i < m.rows(); i++)
	{
		json row = json::array();
		for (std::size_t j = 0; j < m.cols(); j++)
			row.push_back(m(i, j).str());
		rows.push_back(row);
	}
	return rows;
}

json axis_json(const AxisPart &a)
{
	return json { { "origin", a.origin }, { "step", a.step }, { "count", a.count } };
}

json pair_json(Index2 v)
{
	return json::array( { v.row, v.col });
}

}

json transform_json(const TransformSet &ts)
{
	json points = json::array();
	for (const Rational &p : ts.points)
		points.push_back(p.str());
	points.push_back("inf");
	return json { { "m", ts.m }, { "r", ts.r }, { "l", ts.l() }, { "points", points }, { "G", matrix_json(ts.G) }, { "B_t", matrix_json(ts.B_t) }, { "A_t",
			matrix_json(ts.A_t) } };
}

json plan_json(const DecompositionPlan &plan)
{
	json rows = json::array(), cols = json::array(), parts = json::array();
	for (const AxisPart &a : plan.row_parts)
		rows.push_back(axis_json(a));
	for (const AxisPart &a : plan.col_parts)
		cols.push_back(axis_json(a));
	for (const KernelPart &p : plan.parts)
		parts.push_back(json { { "row", axis_json(p.row) }, { "col", axis_json(p.col) }, { "taps", p.taps() }, { "transform", { "F(2," + std::to_string(
				p.row.count) + ")", "F(2," + std::to_string(p.col.count) + ")" } } });
	const Padding &pad = plan.spec.pad;
	return json { { "kernel", pair_json(plan.spec.kernel) }, { "stride", pair_json(plan.spec.stride) }, { "pad", { pad.top, pad.bottom, pad.left, pad.right } }, {
			"row_parts", rows }, { "col_parts", cols }, { "parts", parts } };
}

} // namespace dwm
