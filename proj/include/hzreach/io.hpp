#pragma once

#include "hzreach/ident.hpp"

#include <json.hpp>

#include <string>

namespace hzreach::io
{

using json = nlohmann::json;

/// Row-major nested arrays; an n x 0 matrix is written as n empty rows.
json to_json(const Matrix& m);
json to_json(const Vector& v);
json to_json(const Zonotope& z);
json to_json(const HybridZonotope& z);
json to_json(const MatrixZonotope& m);
json to_json(const PolyhedralRegion& r);

/// `cols` fixes the column count of a matrix given as [] (0 rows).
Matrix matrix_from_json(const json& j, Index cols = 0);
Vector vector_from_json(const json& j);
Zonotope zonotope_from_json(const json& j);
/// Accepts the hybrid form (center, gc, gb, ac, ab, b) or a plain zonotope (center, generators).
HybridZonotope hybrid_zonotope_from_json(const json& j);
MatrixZonotope matrix_zonotope_from_json(const json& j);
PolyhedralRegion region_from_json(const json& j, Index n);

json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline; doubles use shortest round-trip formatting.
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace hzreach::io
