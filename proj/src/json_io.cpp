#include "rpa/json_io.hpp"

#include <fstream>

#include "rpa/linalg.hpp"

namespace rpa {

using nlohmann::json;

json matrix_to_json(const Matrix& M) {
    json data = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) data.push_back(M(i, j));
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw InvalidInput(what + ": expected {rows, cols, data}");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw InvalidInput(what + ": rows/cols must be integers");
    const Eigen::Index rows = j["rows"].get<Eigen::Index>();
    const Eigen::Index cols = j["cols"].get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw InvalidInput(what + ": negative dimensions");
    const json& data = j["data"];
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw InvalidInput(what + ": data length must equal rows*cols");
    Matrix M(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++k) {
            const json& v = data[static_cast<size_t>(k)];
            if (!v.is_number()) throw InvalidInput(what + ": non-numeric entry");
            M(i, j2) = v.get<double>();
        }
    if (!all_finite(M)) throw InvalidInput(what + ": non-finite entry");
    return M;
}

SystemPair system_from_json(const json& j) {
    if (!j.is_object() || !j.contains("A") || !j.contains("B"))
        throw InvalidInput("system file: expected {A, B}");
    SystemPair sys;
    sys.A = matrix_from_json(j["A"], "system A");
    sys.B = matrix_from_json(j["B"], "system B");
    sys.validate();
    return sys;
}

namespace {

RawPole pole_entry(const json& e) {
    RawPole p;
    if (e.is_number()) {
        p.re = e.get<double>();
        return p;
    }
    if (e.is_array()) {
        if (e.empty() || e.size() > 3) throw InvalidInput("pole entry: expected [re], [re, im], or [re, im, mult]");
        for (const auto& v : e)
            if (!v.is_number()) throw InvalidInput("pole entry: non-numeric element");
        p.re = e[0].get<double>();
        if (e.size() > 1) p.im = e[1].get<double>();
        if (e.size() > 2) {
            if (!e[2].is_number_integer()) throw InvalidInput("pole entry: mult must be an integer");
            p.mult = e[2].get<int>();
        }
        return p;
    }
    if (e.is_object()) {
        if (!e.contains("re") || !e["re"].is_number())
            throw InvalidInput("pole entry: object needs numeric re");
        p.re = e["re"].get<double>();
        if (e.contains("im")) {
            if (!e["im"].is_number()) throw InvalidInput("pole entry: im must be numeric");
            p.im = e["im"].get<double>();
        }
        if (e.contains("mult")) {
            if (!e["mult"].is_number_integer())
                throw InvalidInput("pole entry: mult must be an integer");
            p.mult = e["mult"].get<int>();
        }
        return p;
    }
    throw InvalidInput("pole entry: expected number, array, or object");
}

}  // namespace

PoleFile poles_from_json(const json& j) {
    PoleFile out;
    const json* list = nullptr;
    if (j.is_array()) {
        list = &j;
    } else if (j.is_object() && j.contains("poles")) {
        list = &j["poles"];
        if (j.contains("conjugate_pairs")) {
            if (!j["conjugate_pairs"].is_boolean())
                throw InvalidInput("pole file: conjugate_pairs must be boolean");
            out.conjugate_pairs = j["conjugate_pairs"].get<bool>();
        }
    } else {
        throw InvalidInput("pole file: expected an array or {poles: [...]}");
    }
    if (!list->is_array() || list->empty())
        throw InvalidInput("pole file: pole list must be a non-empty array");
    for (const auto& e : *list) out.entries.push_back(pole_entry(e));
    return out;
}

json report_to_json(const RobustnessReport& rep) {
    json gm = json::array();
    for (const auto& [pole, count] : rep.g_multi)
        gm.push_back({{"re", pole.real()}, {"im", pole.imag()}, {"count", count}});
    json errs = json::array();
    for (double e : rep.accuracy.errors) errs.push_back(e);
    json acc{{"exact", rep.accuracy.exact},
             {"max_error", rep.accuracy.max_error},
             {"errors", std::move(errs)}};
    if (!rep.accuracy.exact) acc["precs"] = rep.accuracy.precs;
    return json{{"dep", rep.dep},
                {"kappa_f", rep.kappa_f},
                {"defective", rep.defective},
                {"f_norm", rep.f_norm},
                {"accuracy", std::move(acc)},
                {"g_multi", std::move(gm)},
                {"residual", rep.residual}};
}

json result_to_json(const AssignmentResult& res, const RobustnessReport* rep) {
    json groups = json::array();
    for (const GroupStructure& g : res.groups) {
        json sizes = json::array();
        for (int s : g.block_sizes) sizes.push_back(s);
        groups.push_back({{"re", g.pole.real()},
                          {"im", g.pole.imag()},
                          {"mult", g.mult},
                          {"complex", g.is_complex},
                          {"block_sizes", std::move(sizes)}});
    }
    json blocks = json::array();
    for (const DiagBlock& b : res.blocks)
        blocks.push_back({{"start", b.start},
                          {"size", b.size},
                          {"re", b.pole.real()},
                          {"im", b.pole.imag()},
                          {"delta", b.delta}});
    json out{{"F", matrix_to_json(res.F)},
             {"X", matrix_to_json(res.X)},
             {"T", matrix_to_json(res.T)},
             {"groups", std::move(groups)},
             {"blocks", std::move(blocks)},
             {"krylov_rank", res.krylov_rank},
             {"orth_residual", res.orth_residual},
             {"constraint_residual", res.constraint_residual},
             {"schur_residual", res.schur_residual}};
    if (rep) out["metrics"] = report_to_json(*rep);
    return out;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InvalidInput("invalid JSON in " + path);
    return j;
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open " + path + " for writing");
    out << text;
    if (!out) throw InvalidInput("write failed for " + path);
}

}  // namespace rpa
