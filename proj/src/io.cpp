#include "hzreach/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace hzreach::io
{

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i)
    {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

json to_json(const Zonotope& z)
{
    return json{{"type", "zonotope"}, {"center", to_json(z.center())}, {"generators", to_json(z.generators())}};
}

json to_json(const HybridZonotope& z)
{
    return json{{"type", "hybrid_zonotope"}, {"center", to_json(z.center())}, {"gc", to_json(z.gc())},
                {"gb", to_json(z.gb())},     {"ac", to_json(z.ac())},         {"ab", to_json(z.ab())},
                {"b", to_json(z.b())}};
}

json to_json(const MatrixZonotope& m)
{
    json gens = json::array();
    for (const auto& g : m.generators())
        gens.push_back(to_json(g));
    return json{{"type", "matrix_zonotope"}, {"center", to_json(m.center())}, {"generators", std::move(gens)}};
}

json to_json(const PolyhedralRegion& r) { return json{{"L", to_json(r.l())}, {"rho", to_json(r.rho())}}; }

Matrix matrix_from_json(const json& j, Index cols)
{
    if (!j.is_array())
        throw std::invalid_argument("matrix must be an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0)
        return Matrix(0, cols);
    const Index c = static_cast<Index>(j.front().size());
    Matrix m(rows, c);
    for (Index i = 0; i < rows; ++i)
    {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c)
            throw std::invalid_argument("matrix rows must all have the same length");
        for (Index k = 0; k < c; ++k)
            m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("vector must be an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

Zonotope zonotope_from_json(const json& j)
{
    const Vector c = vector_from_json(j.at("center"));
    Matrix g = j.contains("generators") ? matrix_from_json(j.at("generators")) : Matrix(c.size(), 0);
    if (g.rows() == 0)
        g.resize(c.size(), 0);
    return Zonotope(c, g);
}

HybridZonotope hybrid_zonotope_from_json(const json& j)
{
    if (!j.contains("gc"))
        return lift_zonotope(zonotope_from_json(j));
    const Vector c = vector_from_json(j.at("center"));
    const Vector b = j.contains("b") ? vector_from_json(j.at("b")) : Vector(0);
    Matrix gc = matrix_from_json(j.at("gc"));
    Matrix gb = j.contains("gb") ? matrix_from_json(j.at("gb")) : Matrix(c.size(), 0);
    if (gc.rows() == 0)
        gc.resize(c.size(), 0);
    if (gb.rows() == 0)
        gb.resize(c.size(), 0);
    Matrix ac = j.contains("ac") ? matrix_from_json(j.at("ac"), gc.cols()) : Matrix(0, gc.cols());
    Matrix ab = j.contains("ab") ? matrix_from_json(j.at("ab"), gb.cols()) : Matrix(0, gb.cols());
    return HybridZonotope(gc, gb, c, ac, ab, b);
}

MatrixZonotope matrix_zonotope_from_json(const json& j)
{
    const Matrix c = matrix_from_json(j.at("center"));
    std::vector<Matrix> gens;
    for (const auto& g : j.at("generators"))
        gens.push_back(matrix_from_json(g, c.cols()));
    return MatrixZonotope(c, std::move(gens));
}

PolyhedralRegion region_from_json(const json& j, Index n)
{
    return PolyhedralRegion(matrix_from_json(j.at("L"), n), vector_from_json(j.at("rho")));
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace hzreach::io
