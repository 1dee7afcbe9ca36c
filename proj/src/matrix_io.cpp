#include "freedil/matrix_io.hpp"

#include <fstream>
#include <sstream>

namespace freedil {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& where)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw IngestError(where + ": expected [re, im], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const ComplexMatrix& m)
{
    Json data = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_to_json(m(i, j)));
        data.push_back(std::move(row));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where)
{
    if (!j.is_object())
        throw IngestError(where + ": expected an object with rows/cols/data");
    for (const char* key : {"rows", "cols", "data"})
        if (!j.contains(key))
            throw IngestError(where + ": missing field \"" + key + "\"");
    const auto count = [](const Json& v) { return v.is_number_integer() && v.get<long long>() >= 0; };
    if (!count(j["rows"]) || !count(j["cols"]))
        throw IngestError(where + ": rows and cols must be non-negative integers");
    const auto rows = j["rows"].get<Index>();
    const auto cols = j["cols"].get<Index>();
    const Json& data = j["data"];
    if (!data.is_array() || static_cast<Index>(data.size()) != rows)
        throw IngestError(where + "/data: expected " + std::to_string(rows) + " rows");
    ComplexMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = data[static_cast<std::size_t>(r)];
        const std::string row_where = where + "/data/" + std::to_string(r);
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw IngestError(row_where + ": expected " + std::to_string(cols) + " entries");
        for (Index c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], row_where + "/" + std::to_string(c));
    }
    if (!m.allFinite())
        throw IngestError(where + ": non-finite entries");
    return m;
}

Json vector_to_json(const ComplexVector& v)
{
    Json data = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        data.push_back(complex_to_json(v[i]));
    return data;
}

ComplexVector vector_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array())
        throw IngestError(where + ": expected an array of [re, im]");
    ComplexVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Index>(i)] = complex_from_json(j[i], where + "/" + std::to_string(i));
    if (!v.allFinite())
        throw IngestError(where + ": non-finite entries");
    return v;
}

Json state_to_json(const State& s)
{
    if (s.is_vector())
        return Json{{"kind", "vector"}, {"dim", s.dim()}, {"data", vector_to_json(s.vector())}};
    return Json{{"kind", "density"}, {"dim", s.dim()}, {"data", matrix_to_json(s.density())["data"]}};
}

State state_from_json(const Json& j, double tol, const std::string& where)
{
    if (!j.is_object() || !j.contains("kind") || !j.contains("data"))
        throw IngestError(where + ": expected {\"kind\", \"dim\", \"data\"}");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    try {
        if (kind == "vector") {
            ComplexVector v = vector_from_json(j["data"], where + "/data");
            if (j.contains("dim") && j["dim"].get<Index>() != v.size())
                throw IngestError(where + ": dim " + j["dim"].dump() + " but " + std::to_string(v.size()) +
                                  " entries");
            return State::from_vector(std::move(v), tol);
        }
        if (kind == "density") {
            const Index d = j.contains("dim") ? j["dim"].get<Index>() : static_cast<Index>(j["data"].size());
            ComplexMatrix rho = matrix_from_json(Json{{"rows", d}, {"cols", d}, {"data", j["data"]}}, where);
            return State::from_density(std::move(rho), tol);
        }
    } catch (const IngestError&) {
        throw;
    } catch (const Error& e) {
        throw IngestError(where + ": " + e.what());
    } catch (const Json::exception& e) {
        throw IngestError(where + ": " + e.what());
    }
    throw IngestError(where + "/kind: expected \"vector\" or \"density\"");
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IngestError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        // nlohmann reports "at line L, column C" in its message.
        throw IngestError(path + ": " + e.what());
    }
}

} // namespace freedil
