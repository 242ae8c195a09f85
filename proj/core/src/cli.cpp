#include "lqgibbs/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "lqgibbs/l1_certifier.hpp"
#include "lqgibbs/lq_solver.hpp"
#include "lqgibbs/mesh.hpp"
#include "lqgibbs/theory.hpp"

namespace lqg {
namespace cli {

namespace {

std::string fmt12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

int thread_cap() {
    if (const char* env = std::getenv("LQGIBBS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// run independent tasks on a bounded pool; task order fixes the result order
void run_tasks(std::vector<std::function<void()>> tasks) {
    const int cap = std::min<int>(thread_cap(), static_cast<int>(tasks.size()));
    if (cap <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < cap; ++w) {
        pool.emplace_back([&tasks, &next] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                tasks[i]();
            }
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<double> parse_q_spec(const std::string& spec) {
    std::vector<double> qs;
    if (spec.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(spec);
        if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0))
            throw DomainError("bad q range, expected a:b:step");
        const double dir = b >= a ? 1.0 : -1.0;
        for (double q = a; dir * (q - b) <= 1e-12; q += dir * step) qs.push_back(q);
        return qs;
    }
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) qs.push_back(std::stod(tok));
    if (qs.empty()) throw DomainError("empty q list");
    return qs;
}

std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> v;
    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

TargetFunction parse_target(const std::string& spec) {
    if (spec.empty() || spec == "const1") return TargetFunction::constant_one();
    if (spec == "sgnx") return TargetFunction::sgn_x();
    if (spec.rfind("sine:", 0) == 0) {
        std::string params = spec.substr(5);
        for (char& ch : params)
            if (ch == ':') ch = ',';
        const auto v = parse_double_list(params);
        if (v.size() != 2) throw DomainError("sine target needs sine:A:K");
        return TargetFunction::sine_perturbed(v[0], v[1]);
    }
    if (spec.rfind("layer:", 0) == 0) return TargetFunction::boundary_layer(std::stod(spec.substr(6)));
    throw DomainError("unknown target: " + spec + " (const1|sgnx|sine:A:K|layer:EPS)");
}

SquarePattern parse_pattern(const std::string& name) {
    if (name == "mesh1") return SquarePattern::MESH1;
    if (name == "mesh2") return SquarePattern::MESH2;
    if (name == "mesh3") return SquarePattern::MESH3;
    if (name == "mesh4") return SquarePattern::MESH4;
    throw DomainError("unknown pattern: " + name + " (mesh1|mesh2|mesh3|mesh4)");
}

// --mesh accepts a pattern name, a built-in unstructured mesh, or a file path
AnyMesh resolve_mesh(const std::string& src) {
    if (src == "mesh1" || src == "mesh2" || src == "mesh3" || src == "mesh4")
        return structured_square_mesh(parse_pattern(src));
    if (src == "meshA" || src == "meshB" || src == "meshC") return builtin_unstructured_mesh(src);
    return load_mesh(src);
}

Mesh1D mesh_from_lengths(const std::vector<double>& h, double origin) {
    std::vector<double> bp{origin};
    for (double hi : h) bp.push_back(bp.back() + hi);
    return Mesh1D(std::move(bp));
}

struct OutputFile {
    explicit OutputFile(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw DomainError("cannot open output file: " + path);
        }
    }
    std::ostream& stream(std::ostream& fallback) { return file.is_open() ? file : fallback; }
    std::ofstream file;
};

Problem pick_problem(const std::string& flag, const AnyMesh& mesh, const TargetFunction& u) {
    if (flag == "boundary1d") return Problem::BOUNDARY_1D;
    if (flag == "jump1d") return Problem::JUMP_1D;
    if (flag == "boundary2d") return Problem::BOUNDARY_2D;
    if (!flag.empty() && flag != "auto") throw DomainError("unknown problem: " + flag);
    if (std::holds_alternative<TriMesh>(mesh)) return Problem::BOUNDARY_2D;
    return u.kind() == TargetFunction::Kind::sgn_x ? Problem::JUMP_1D : Problem::BOUNDARY_1D;
}

void write_solution_csv(std::ostream& os, const FEFunction& f) {
    const auto& space = f.space();
    if (space.dim() == 1) {
        os << "x,uh\n";
        for (int i = 0; i < space.n_nodes(); ++i)
            os << fmt12(space.node_position(i).x) << ',' << fmt12(f.coeff(i)) << '\n';
    } else {
        os << "x,y,uh\n";
        for (int i = 0; i < space.n_nodes(); ++i) {
            const Point2 p = space.node_position(i);
            os << fmt12(p.x) << ',' << fmt12(p.y) << ',' << fmt12(f.coeff(i)) << '\n';
        }
    }
}

const char* verdict_name(CertVerdict v) {
    switch (v) {
        case CertVerdict::CERTIFIED: return "CERTIFIED";
        case CertVerdict::NOT_OPTIMAL: return "NOT_OPTIMAL";
        default: return "UNDECIDED";
    }
}

// --- reproduce implementations ---------------------------------------------

void reproduce_fig1(std::ostream& os) {
    SpacePtr space = build_space(uniform_mesh(0, 1, 4), Problem::BOUNDARY_1D);
    const auto u = TargetFunction::constant_one();
    FEFunction f2 = solve_l2(space, u);
    SolverOptions opts;
    opts.q_target = 1.2;
    FEFunction f12 = solve_lq(space, u, opts).coeffs;
    os << "x,q2,q1.2\n";
    for (int i = 0; i < space->n_nodes(); ++i)
        os << fmt12(space->node_position(i).x) << ',' << fmt12(f2.coeff(i)) << ','
           << fmt12(f12.coeff(i)) << '\n';
}

void reproduce_fig2(std::ostream& os) {
    std::vector<double> qs;
    for (int i = 1; i <= 100; ++i) qs.push_back(1.0 + 0.01 * i);
    for (double q = 2.25; q <= 10.0 + 1e-12; q += 0.25) qs.push_back(q);
    os << "q,h0.25,h0.5,h0.75\n";
    for (double q : qs) {
        os << fmt12(q);
        for (double h : {0.25, 0.5, 0.75}) os << ',' << fmt12(theory::alpha_two_element_lq(h, q));
        os << '\n';
    }
}

void reproduce_fig5(std::ostream& os) {
    std::vector<double> qs;
    for (double q = 1.1; q <= 3.0 + 1e-12; q += 0.1) qs.push_back(q);
    std::vector<double> numeric(qs.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        tasks.push_back([&qs, &numeric, i] {
            SpacePtr space = build_space(structured_square_mesh(SquarePattern::MESH1), Problem::BOUNDARY_2D);
            SolverOptions opts;
            opts.q_target = qs[i];
            const FEFunction f = solve_lq(space, TargetFunction::constant_one(), opts).coeffs;
            numeric[i] = f.coeff(space->free_nodes()[0]);
        });
    }
    run_tasks(std::move(tasks));
    os << "q,alpha_theory,alpha_solver\n";
    for (std::size_t i = 0; i < qs.size(); ++i)
        os << fmt12(qs[i]) << ',' << fmt12(theory::alpha_mesh1_lq(qs[i])) << ',' << fmt12(numeric[i]) << '\n';
}

void reproduce_fig7(std::ostream& os) {
    os << "refine,elements,max_uh\n";
    for (int refine = 0; refine <= 3; ++refine) {
        TriMesh mesh = structured_square_mesh(SquarePattern::MESH1, refine);
        SpacePtr space = build_space(mesh, Problem::BOUNDARY_2D);
        FEFunction f = solve_l2(space, TargetFunction::constant_one());
        double maxv = 0.0;
        for (double c : f.coeffs()) maxv = std::max(maxv, c);
        os << refine << ',' << mesh.n_triangles() << ',' << fmt12(maxv) << '\n';
    }
}

std::vector<double> descending_range(double from, double to, double step) {
    std::vector<double> qs;
    for (double q = from; q >= to - 1e-12; q -= step) qs.push_back(q);
    return qs;
}

Mesh1D last_doubled_mesh(int n) {
    // n-1 elements of size h plus one of size 2h, (n+1) h = 1
    const double h = 1.0 / (n + 1);
    std::vector<double> bp;
    for (int i = 0; i < n; ++i) bp.push_back(i * h);
    bp.push_back(1.0);
    return Mesh1D(std::move(bp));
}

void reproduce_fig9(std::ostream& os) {
    const auto u = TargetFunction::sine_perturbed(0.1, 1.0);
    const auto qs = descending_range(2.0, 1.2, 0.1);
    std::vector<Mesh1D> meshes{uniform_mesh(0, 1, 5), uniform_mesh(0, 1, 100),
                               last_doubled_mesh(5), last_doubled_mesh(100)};
    std::vector<std::vector<SweepRow>> rows(meshes.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t m = 0; m < meshes.size(); ++m) {
        tasks.push_back([&, m] {
            SpacePtr space = build_space(meshes[m], Problem::BOUNDARY_1D);
            rows[m] = sweep_q(space, u, qs);
        });
    }
    run_tasks(std::move(tasks));
    os << "q,uniform5,uniform100,nonuniform5,nonuniform100\n";
    for (std::size_t i = 0; i < qs.size(); ++i) {
        os << fmt12(qs[i]);
        for (const auto& r : rows) {
            if (r[i].converged)
                os << ',' << fmt12(std::max(r[i].max_over, r[i].max_under));
            else
                os << ",NA";
        }
        os << '\n';
    }
}

void reproduce_fig10(std::ostream& os) {
    const auto qs = descending_range(2.0, 1.1, 0.1);
    const SquarePattern patterns[3] = {SquarePattern::MESH2, SquarePattern::MESH3, SquarePattern::MESH4};
    std::vector<std::vector<SweepRow>> rows(3);
    std::vector<std::function<void()>> tasks;
    for (int m = 0; m < 3; ++m) {
        tasks.push_back([&, m] {
            SpacePtr space = build_space(structured_square_mesh(patterns[m]), Problem::BOUNDARY_2D);
            rows[static_cast<std::size_t>(m)] = sweep_q(space, TargetFunction::constant_one(), qs);
        });
    }
    run_tasks(std::move(tasks));
    os << "q,mesh2,mesh3,mesh4\n";
    for (std::size_t i = 0; i < qs.size(); ++i) {
        os << fmt12(qs[i]);
        for (const auto& r : rows) {
            if (r[i].converged)
                os << ',' << fmt12(1.0 + r[i].max_over);
            else
                os << ",NA";
        }
        os << '\n';
    }
    // q = 1 from the closed forms
    os << "1," << fmt12(theory::alpha_mesh2_l1()) << ",1,1\n";
}

void reproduce_fig3el(std::ostream& os) {
    const auto u = TargetFunction::constant_one();
    std::vector<double> qs = descending_range(2.0, 1.2, 0.1);
    // extra small-q rows feed the q -> 1 extrapolation of the first mesh
    std::vector<double> qs_ext = qs;
    for (double q : {1.1, 1.05, 1.02, 1.01, 1.009, 1.008}) qs_ext.push_back(q);

    SpacePtr sA = build_space(interval_mesh({0.0, 0.1, 0.55, 1.0}), Problem::BOUNDARY_1D);
    SpacePtr sB = build_space(interval_mesh({0.0, 0.1, 0.6, 1.0}), Problem::BOUNDARY_1D);
    std::vector<SweepRow> rowsA, rowsB;
    std::vector<std::function<void()>> tasks;
    tasks.push_back([&] { rowsA = sweep_q(sA, u, qs_ext); });
    tasks.push_back([&] { rowsB = sweep_q(sB, u, qs); });
    run_tasks(std::move(tasks));

    os << "q,h2_0.45,h2_0.50\n";
    for (std::size_t i = 0; i < qs.size(); ++i) {
        auto err = [](const SweepRow& r) { return std::max(r.max_over, r.max_under); };
        os << fmt12(qs[i]) << ',' << (rowsA[i].converged ? fmt12(err(rowsA[i])) : "NA") << ','
           << (rowsB[i].converged ? fmt12(err(rowsB[i])) : "NA") << '\n';
    }
    const FEFunction l1A = extrapolate_to_l1(rowsA);
    const auto repA = nodal_overshoot(l1A, u);
    os << "1," << fmt12(std::max(repA.max_over, repA.max_under)) << ",0\n";
}

void reproduce_fig12(std::ostream& os) {
    const auto qs = descending_range(2.0, 1.3, 0.1);
    const char* names[3] = {"meshA", "meshB", "meshC"};
    std::vector<std::vector<SweepRow>> rows(3);
    std::vector<std::function<void()>> tasks;
    for (int m = 0; m < 3; ++m) {
        tasks.push_back([&, m] {
            SpacePtr space = build_space(builtin_unstructured_mesh(names[m]), Problem::BOUNDARY_2D);
            rows[static_cast<std::size_t>(m)] = sweep_q(space, TargetFunction::constant_one(), qs);
        });
    }
    run_tasks(std::move(tasks));
    os << "q,meshA,meshB,meshC\n";
    for (std::size_t i = 0; i < qs.size(); ++i) {
        os << fmt12(qs[i]);
        for (const auto& r : rows) {
            if (r[i].converged)
                os << ',' << fmt12(1.0 + r[i].max_over);
            else
                os << ",NA";
        }
        os << '\n';
    }
}

void reproduce(const std::string& id, std::ostream& os) {
    if (id == "fig1") return reproduce_fig1(os);
    if (id == "fig2") return reproduce_fig2(os);
    if (id == "fig5") return reproduce_fig5(os);
    if (id == "fig7") return reproduce_fig7(os);
    if (id == "fig9") return reproduce_fig9(os);
    if (id == "fig10") return reproduce_fig10(os);
    if (id == "fig3el") return reproduce_fig3el(os);
    if (id == "fig12") return reproduce_fig12(os);
    throw DomainError("unknown figure id: " + id +
                      " (known: fig1 fig2 fig5 fig7 fig9 fig10 fig3el fig12)");
}

// --- certify helpers --------------------------------------------------------

std::vector<double> load_coeffs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open coefficient file: " + path);
    std::string magic;
    int version = 0, n = 0;
    if (!(in >> magic >> version >> n) || magic != "lqcoeffs" || version != 1 || n < 1)
        throw DomainError("malformed coefficient file, expected 'lqcoeffs 1 <n>'");
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        if (!(in >> c[static_cast<std::size_t>(i)])) throw DomainError("missing coefficient values");
    return c;
}

CertificateResult certify_from_theory(const std::string& name) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::istringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        return parts;
    };
    const auto parts = split(name);
    const auto u1 = TargetFunction::constant_one();

    if (parts[0] == "two-element") {
        if (parts.size() != 2) throw DomainError("expected two-element:H");
        const double h = std::stod(parts[1]);
        const double alpha = theory::alpha_two_element_l1(h);
        SpacePtr space = build_space(interval_mesh({0.0, 1.0 - h, 1.0}), Problem::BOUNDARY_1D);
        return certify_l1(space, FEFunction(space, {1.0, alpha, 0.0}), u1);
    }
    if (parts[0] == "jump") {
        if (parts.size() != 3) throw DomainError("expected jump:H:BETA");
        return certify_family_jump(std::stod(parts[1]), std::stod(parts[2]));
    }

    auto square_candidate = [&](SquarePattern p, std::vector<double> line_values) {
        SpacePtr space = build_space(structured_square_mesh(p), Problem::BOUNDARY_2D);
        std::vector<double> coeffs(static_cast<std::size_t>(space->n_nodes()), 0.0);
        for (int k = 0; k < space->n_free(); ++k)
            coeffs[static_cast<std::size_t>(space->free_nodes()[static_cast<std::size_t>(k)])] =
                line_values[static_cast<std::size_t>(k)];
        return certify_l1(space, FEFunction(space, std::move(coeffs)), u1);
    };
    // free nodes of mesh2-4 are (0.5,0), (0.5,0.5), (0.5,1) in node order
    if (name == "mesh1") return square_candidate(SquarePattern::MESH1, {theory::alpha_mesh1_l1()});
    if (name == "mesh1-ones") return square_candidate(SquarePattern::MESH1, {1.0});
    if (name == "mesh2") return square_candidate(SquarePattern::MESH2, {theory::alpha_mesh2_l1(), 1.0, 1.0});
    if (name == "mesh2-ones") return square_candidate(SquarePattern::MESH2, {1.0, 1.0, 1.0});
    if (name == "mesh3-ones") return square_candidate(SquarePattern::MESH3, {1.0, 1.0, 1.0});
    if (name == "mesh4-ones") return square_candidate(SquarePattern::MESH4, {1.0, 1.0, 1.0});
    throw DomainError("unknown theory candidate: " + name +
                      " (two-element:H jump:H:B mesh1 mesh1-ones mesh2 mesh2-ones mesh3-ones mesh4-ones)");
}

std::string theta_to_string(const theory::ThetaSchedule& s) {
    std::ostringstream os;
    os << "theta=[";
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
        if (i) os << ' ';
        if (std::isnan(s.theta[i]))
            os << "undef";
        else
            os << fmt12(s.theta[i]);
    }
    os << "]";
    return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"L^q best approximation of discontinuities by P1 finite elements"};
    app.require_subcommand(1);
    // --h is a real flag here, so help must not claim the short -h
    app.set_help_flag("--help", "print usage");

    // gen-mesh
    auto* gen = app.add_subcommand("gen-mesh", "generate a structured unit-square mesh");
    std::string gen_pattern, gen_out;
    int gen_refine = 0;
    gen->add_option("--pattern", gen_pattern, "mesh1|mesh2|mesh3|mesh4")->required();
    gen->add_option("--refine", gen_refine, "criss-cross refinement level (mesh1 only)");
    gen->add_option("-o,--output", gen_out, "output file")->required();

    // mesh-check
    auto* check = app.add_subcommand("mesh-check", "evaluate the 1D no-overshoot mesh conditions");
    std::string check_h, check_mesh;
    check->add_option("--h", check_h, "comma-separated element lengths");
    check->add_option("--mesh", check_mesh, "mesh file");

    // solve
    auto* solve = app.add_subcommand("solve", "solve one L^q best-approximation problem");
    std::string solve_mesh, solve_h, solve_problem = "auto", solve_target = "const1", solve_out;
    double solve_q = 2.0;
    solve->add_option("--mesh", solve_mesh, "mesh1..mesh4|meshA..meshC|FILE");
    solve->add_option("--h", solve_h, "1D element lengths");
    solve->add_option("--problem", solve_problem, "auto|boundary1d|jump1d|boundary2d");
    solve->add_option("--q", solve_q, "exponent q > 1 (or 2)")->required();
    solve->add_option("--target", solve_target, "const1|sgnx|sine:A:K|layer:EPS");
    solve->add_option("-o,--output", solve_out, "CSV output file");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "q-sweep with warm starts");
    std::string sweep_mesh, sweep_h, sweep_problem = "auto", sweep_target = "const1", sweep_out, sweep_q_spec;
    sweep->add_option("--mesh", sweep_mesh, "mesh1..mesh4|meshA..meshC|FILE");
    sweep->add_option("--h", sweep_h, "1D element lengths");
    sweep->add_option("--problem", sweep_problem, "auto|boundary1d|jump1d|boundary2d");
    sweep->add_option("--q", sweep_q_spec, "range a:b:step or comma list")->required();
    sweep->add_option("--target", sweep_target, "const1|sgnx|sine:A:K|layer:EPS");
    sweep->add_option("-o,--output", sweep_out, "CSV output file");

    // certify
    auto* certify = app.add_subcommand("certify", "L^1 optimality certificate");
    std::string cert_mesh, cert_h, cert_coeffs, cert_theory, cert_target = "const1", cert_out;
    certify->add_option("--mesh", cert_mesh, "mesh1..mesh4|meshA..meshC|FILE");
    certify->add_option("--h", cert_h, "1D element lengths");
    certify->add_option("--coeffs", cert_coeffs, "coefficient file (lqcoeffs format)");
    certify->add_option("--from-theory", cert_theory, "closed-form candidate name");
    certify->add_option("--target", cert_target, "const1|sgnx");
    certify->add_option("-o,--output", cert_out, "output file");

    // reproduce
    auto* rep = app.add_subcommand("reproduce", "emit a published data table as CSV");
    std::string rep_id, rep_out;
    rep->add_option("id", rep_id, "fig1 fig2 fig5 fig7 fig9 fig10 fig3el fig12")->required();
    rep->add_option("-o,--output", rep_out, "CSV output file");

    for (CLI::App* sub : app.get_subcommands({})) sub->set_help_flag("--help", "print usage");

    std::vector<const char*> argv;
    argv.push_back("lqgibbs");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 3;
    }

    try {
        if (gen->parsed()) {
            const TriMesh mesh = structured_square_mesh(parse_pattern(gen_pattern), gen_refine);
            save_mesh(mesh, gen_out);
            out << "wrote " << gen_out << " (" << mesh.n_vertices() << " vertices, "
                << mesh.n_triangles() << " triangles)\n";
            return 0;
        }

        if (check->parsed()) {
            std::vector<double> h;
            if (!check_h.empty()) {
                h = parse_double_list(check_h);
            } else if (!check_mesh.empty()) {
                const AnyMesh mesh = load_mesh(check_mesh);
                const auto* m1 = std::get_if<Mesh1D>(&mesh);
                if (!m1) throw DomainError("mesh-check requires a 1D mesh");
                h = m1->element_lengths();
            } else {
                throw DomainError("mesh-check needs --h or --mesh");
            }
            const auto schedule = theory::theta_schedule(h);
            const auto verdict = theory::check_no_overshoot_l1(h);
            const char* name = verdict == theory::OvershootVerdict::SUFFICIENT_MINLAST
                                   ? "SUFFICIENT_MINLAST"
                                   : (verdict == theory::OvershootVerdict::SUFFICIENT_GRADED
                                          ? "SUFFICIENT_GRADED"
                                          : "UNKNOWN");
            out << name << ", M=" << schedule.M << '\n' << theta_to_string(schedule) << '\n';
            return 0;
        }

        if (solve->parsed()) {
            const TargetFunction u = parse_target(solve_target);
            AnyMesh mesh = !solve_mesh.empty()
                               ? resolve_mesh(solve_mesh)
                               : AnyMesh(mesh_from_lengths(parse_double_list(solve_h),
                                                           u.kind() == TargetFunction::Kind::sgn_x ? -1.0 : 0.0));
            const Problem problem = pick_problem(solve_problem, mesh, u);
            SpacePtr space = build_space(std::move(mesh), problem);
            OutputFile of(solve_out);
            FEFunction f = [&] {
                if (std::abs(solve_q - 2.0) <= 1e-12) return solve_l2(space, u);
                SolverOptions opts;
                opts.q_target = solve_q;
                SolveReport r = solve_lq(space, u, opts);
                err << "residual " << fmt12(r.residual_norm) << " after " << r.stages.size()
                    << " stages\n";
                return r.coeffs;
            }();
            write_solution_csv(of.stream(out), f);
            return 0;
        }

        if (sweep->parsed()) {
            const TargetFunction u = parse_target(sweep_target);
            AnyMesh mesh = !sweep_mesh.empty()
                               ? resolve_mesh(sweep_mesh)
                               : AnyMesh(mesh_from_lengths(parse_double_list(sweep_h),
                                                           u.kind() == TargetFunction::Kind::sgn_x ? -1.0 : 0.0));
            const Problem problem = pick_problem(sweep_problem, mesh, u);
            SpacePtr space = build_space(std::move(mesh), problem);
            const auto qs = parse_q_spec(sweep_q_spec);
            const auto table = sweep_q(space, u, qs);
            OutputFile of(sweep_out);
            std::ostream& os = of.stream(out);
            os << "q,max_overshoot,max_undershoot,max_nodal_error,max_uh\n";
            bool any_failed = false;
            for (const auto& row : table) {
                if (!row.converged) {
                    os << fmt12(row.q) << ",NA,NA,NA,NA\n";
                    any_failed = true;
                    continue;
                }
                double maxv = row.coeffs.coeffs()[0];
                for (double c : row.coeffs.coeffs()) maxv = std::max(maxv, c);
                os << fmt12(row.q) << ',' << fmt12(row.max_over) << ',' << fmt12(row.max_under)
                   << ',' << fmt12(std::max(row.max_over, row.max_under)) << ',' << fmt12(maxv)
                   << '\n';
            }
            return any_failed ? 2 : 0;
        }

        if (certify->parsed()) {
            OutputFile of(cert_out);
            std::ostream& os = of.stream(out);
            CertificateResult res = [&] {
                if (!cert_theory.empty()) return certify_from_theory(cert_theory);
                if (cert_coeffs.empty()) throw DomainError("certify needs --coeffs or --from-theory");
                const TargetFunction u = parse_target(cert_target);
                AnyMesh mesh = !cert_mesh.empty()
                                   ? resolve_mesh(cert_mesh)
                                   : AnyMesh(mesh_from_lengths(parse_double_list(cert_h),
                                                               u.kind() == TargetFunction::Kind::sgn_x ? -1.0 : 0.0));
                const Problem problem = pick_problem("auto", mesh, u);
                SpacePtr space = build_space(std::move(mesh), problem);
                return certify_l1(space, FEFunction(space, load_coeffs(cert_coeffs)), u);
            }();
            os << verdict_name(res.verdict) << " margin=" << fmt12(res.margin);
            if (res.violated_node) os << " violated_node=" << *res.violated_node;
            os << '\n';
            return 0;
        }

        if (rep->parsed()) {
            OutputFile of(rep_out);
            reproduce(rep_id, of.stream(out));
            return 0;
        }
    } catch (const NonConvergence& e) {
        err << "solver did not converge: " << e.what() << " (q=" << e.q << ", eps=" << e.eps << ")\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}

}  // namespace cli
}  // namespace lqg
