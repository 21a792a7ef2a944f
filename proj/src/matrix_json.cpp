#include "steinmix/matrix_json.hpp"

#include "steinmix/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace steinmix {

Json matrix_to_json(const ComplexMatrix& m) {
    Json re = Json::array();
    Json im = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json re_row = Json::array();
        Json im_row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            re_row.push_back(m(i, j).real());
            im_row.push_back(m(i, j).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace {

void read_part(const Json& rows, Index dim, const char* name, ComplexMatrix& out, bool imaginary) {
    if (!rows.is_array() || static_cast<Index>(rows.size()) != dim)
        throw ValidationError(std::string("matrix JSON: \"") + name + "\" must have dim rows");
    for (Index i = 0; i < dim; ++i) {
        const Json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != dim)
            throw ValidationError(std::string("matrix JSON: row ") + std::to_string(i) + " of \"" + name +
                                  "\" must have dim entries");
        for (Index j = 0; j < dim; ++j) {
            const Json& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number())
                throw ValidationError(std::string("matrix JSON: non-numeric entry in \"") + name + "\"");
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw ValidationError("matrix JSON: non-finite entry");
            if (imaginary)
                out(i, j).imag(x);
            else
                out(i, j).real(x);
        }
    }
}

}  // namespace

ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("matrix JSON: expected an object with dim/re/im");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw ValidationError("matrix JSON: missing integer \"dim\"");
    const auto dim = j["dim"].get<Index>();
    if (dim < 1) throw ValidationError("matrix JSON: \"dim\" must be positive");
    if (!j.contains("re")) throw ValidationError("matrix JSON: missing \"re\"");
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    read_part(j["re"], dim, "re", m, false);
    if (j.contains("im")) read_part(j["im"], dim, "im", m, true);
    return m;
}

HermitianOperator hermitian_from_json(const Json& j) { return HermitianOperator(matrix_from_json(j)); }

DensityMatrix density_from_json(const Json& j) { return DensityMatrix(hermitian_from_json(j)); }

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open JSON file: " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

Json extended_real_to_json(double x) {
    if (std::isinf(x)) return x > 0 ? Json("inf") : Json("-inf");
    if (std::isnan(x)) return Json("nan");
    return Json(x);
}

double extended_real_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ValidationError("expected a number or \"inf\"");
}

}  // namespace steinmix
