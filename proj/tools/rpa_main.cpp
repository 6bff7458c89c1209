#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpa/bench.hpp"
#include "rpa/driver.hpp"
#include "rpa/json_io.hpp"
#include "rpa/metrics.hpp"

namespace {

using namespace rpa;

// "2,4-7,12" -> {2, 4, 5, 6, 7, 12}
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        if (item.empty()) throw InvalidInput("empty item in list '" + text + "'");
        const size_t dash = item.find('-', 1);
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoi(item));
            } else {
                const int lo = std::stoi(item.substr(0, dash));
                const int hi = std::stoi(item.substr(dash + 1));
                if (hi < lo) throw InvalidInput("descending range '" + item + "'");
                for (int v = lo; v <= hi; ++v) out.push_back(v);
            }
        } catch (const std::logic_error&) {
            throw InvalidInput("cannot parse list item '" + item + "'");
        }
        pos = comma + 1;
    }
    return out;
}

Complex parse_pole(const std::string& text) {
    try {
        const size_t comma = text.find(',');
        if (comma == std::string::npos) return Complex(std::stod(text), 0.0);
        return Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
    } catch (const std::logic_error&) {
        throw InvalidInput("cannot parse pole '" + text + "' (expected re or re,im)");
    }
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        save_text(out_path, text);
}

PoleSpec spec_from_files(const std::string& poles_path, int n, PoleOrder order) {
    const PoleFile pf = poles_from_json(load_json(poles_path));
    return build_pole_spec(pf.entries, n, order, pf.conjugate_pairs);
}

int run(int argc, char** argv) {
    CLI::App app{"State-feedback pole assignment via an orthogonal quasi-triangular factorization"};
    app.require_subcommand(1);

    struct {
        std::string system, poles, out, order = "ascending";
        double tol = -1.0;
    } asn;
    auto* assign_cmd = app.add_subcommand("assign", "Compute a feedback matrix placing the poles");
    assign_cmd->add_option("--system", asn.system, "System file {A, B}")->required();
    assign_cmd->add_option("--poles", asn.poles, "Pole file")->required();
    assign_cmd->add_option("--out", asn.out, "Result path (default stdout)");
    assign_cmd->add_option("--order", asn.order, "Group processing order")
        ->check(CLI::IsMember({"ascending", "given"}));
    assign_cmd->add_option("--tol", asn.tol, "Relative rank tolerance override");

    struct {
        std::string system, poles, result, out;
    } met;
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Robustness report for a previously computed result");
    metrics_cmd->add_option("--system", met.system, "System file {A, B}")->required();
    metrics_cmd->add_option("--poles", met.poles, "Pole file")->required();
    metrics_cmd->add_option("--result", met.result, "Result file holding F")->required();
    metrics_cmd->add_option("--out", met.out, "Report path (default stdout)");

    struct {
        std::string kind = "real", n, m, amax, format = "csv", out, recipe = "qr";
        int trials = 20;
        std::uint64_t seed = 1;
        int jobs = 1;
    } ben;
    auto* bench_cmd = app.add_subcommand("bench", "Randomized grid sweep with mean metrics");
    bench_cmd->add_option("--kind", ben.kind, "Repeated-pole kind")
        ->check(CLI::IsMember({"real", "complex"}));
    bench_cmd->add_option("--n", ben.n, "State dimensions, e.g. 7,9,13 or 3-13")->required();
    bench_cmd->add_option("--m", ben.m, "Input counts")->required();
    bench_cmd->add_option("--amax", ben.amax, "Repeated-pole multiplicities")->required();
    bench_cmd->add_option("--trials", ben.trials, "Trials per grid point");
    bench_cmd->add_option("--seed", ben.seed, "Stream seed");
    bench_cmd->add_option("--format", ben.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    bench_cmd->add_option("--out", ben.out, "Output path (default stdout)");
    bench_cmd->add_option("--recipe", ben.recipe, "System construction recipe")
        ->check(CLI::IsMember({"qr", "dense"}));
    bench_cmd->add_option("--jobs", ben.jobs, "Worker threads");

    struct {
        std::string system, feedback, pole;
        double tol = 1e-8;
    } gm;
    auto* gmult_cmd =
        app.add_subcommand("gmult", "Eigenspace dimension of a pole of the closed loop");
    gmult_cmd->add_option("--system", gm.system, "System file {A, B}")->required();
    gmult_cmd->add_option("--feedback", gm.feedback, "Matrix file holding F")->required();
    gmult_cmd->add_option("--pole", gm.pole, "Pole as re or re,im")->required();
    gmult_cmd->add_option("--tol", gm.tol, "Relative rank tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (assign_cmd->parsed()) {
        const SystemPair sys = system_from_json(load_json(asn.system));
        const PoleOrder order =
            asn.order == "given" ? PoleOrder::AsGiven : PoleOrder::Ascending;
        const PoleSpec spec = spec_from_files(asn.poles, static_cast<int>(sys.A.rows()), order);
        AssignConfig cfg;
        cfg.rank_tol = asn.tol;
        const AssignmentResult res = assign(sys, spec, cfg);
        RobustnessReport rep = evaluate(sys.A, sys.B, res.F, spec);
        rep.residual = res.schur_residual;
        emit(asn.out, result_to_json(res, &rep).dump(2) + "\n");
        return 0;
    }

    if (metrics_cmd->parsed()) {
        const SystemPair sys = system_from_json(load_json(met.system));
        const PoleSpec spec =
            spec_from_files(met.poles, static_cast<int>(sys.A.rows()), PoleOrder::Ascending);
        const nlohmann::json rj = load_json(met.result);
        if (!rj.is_object() || !rj.contains("F"))
            throw InvalidInput("result file: expected an object with F");
        const Matrix F = matrix_from_json(rj["F"], "result F");
        RobustnessReport rep = evaluate(sys.A, sys.B, F, spec);
        if (rj.contains("X") && rj.contains("T")) {
            const Matrix X = matrix_from_json(rj["X"], "result X");
            const Matrix T = matrix_from_json(rj["T"], "result T");
            rep.residual = (sys.A + sys.B * F - X * T * X.transpose()).norm();
        }
        emit(met.out, report_to_json(rep).dump(2) + "\n");
        return 0;
    }

    if (bench_cmd->parsed()) {
        BenchConfig cfg;
        cfg.kind = ben.kind == "complex" ? BenchKind::ComplexRepeated : BenchKind::RealRepeated;
        cfg.n_list = parse_int_list(ben.n);
        cfg.m_list = parse_int_list(ben.m);
        cfg.amax_list = parse_int_list(ben.amax);
        cfg.trials = ben.trials;
        cfg.seed = ben.seed;
        cfg.recipe = ben.recipe == "dense" ? GenRecipe::Dense : GenRecipe::Qr;
        cfg.jobs = ben.jobs;
        std::vector<std::string> notes;
        const std::vector<BenchRow> rows = run_bench(cfg, &notes);
        for (const std::string& note : notes) std::cerr << "note: " << note << "\n";
        emit(ben.out, ben.format == "json" ? bench_json(rows) : bench_csv(rows));
        return 0;
    }

    const SystemPair sys = system_from_json(load_json(gm.system));
    const Matrix F = [&] {
        const nlohmann::json j = load_json(gm.feedback);
        if (j.is_object() && j.contains("F")) return matrix_from_json(j["F"], "feedback F");
        return matrix_from_json(j, "feedback");
    }();
    if (F.rows() != sys.B.cols() || F.cols() != sys.A.rows())
        throw DimensionMismatch("gmult: F must be m x n");
    std::cout << geometric_multiplicity(sys.A + sys.B * F, parse_pole(gm.pole), gm.tol) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConvergenceFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DependentVectors& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DependentRealImag& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const InsufficientRank& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericalDegeneracy& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const SingularR& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const FeasibilityBreakdown& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const GenerationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
