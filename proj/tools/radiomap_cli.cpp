#include "radiomap/io.hpp"
#include "radiomap/pipeline.hpp"
#include "radiomap/theory.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace radiomap;
using io::json;

namespace {

struct Flags {
    std::string config_path;
    int jobs = 0;
    bool print_config = false;

    double beta = 0.0;
    int max_iters = 0;
    bool random_init = false;
    std::uint64_t seed = 0;
    double energy = 0.0;
    int d_max = 0;
    std::vector<int> dims;
    bool d0 = false;
    double wcl_alpha = 0.0;
    double eps = 0.0;
    std::string nmi;
};

// Defaults, then the config file, then flags given on the command line.
PipelineConfig resolve(const Flags& f, const CLI::App& app) {
    PipelineConfig cfg;
    if (!f.config_path.empty()) cfg.overlay(io::read_json(f.config_path));
    json over = json::object();
    auto given = [&](const char* name) {
        const CLI::Option* o = app.get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--beta")) over["beta"] = f.beta;
    if (given("--max-iters")) over["max_iters"] = f.max_iters;
    if (given("--random-init")) over["random_init"] = f.random_init;
    if (given("--seed")) over["seed"] = f.seed;
    if (given("--energy")) over["energy"] = f.energy;
    if (given("--d-max")) over["d_max"] = f.d_max;
    if (given("--dims")) over["dims"] = f.dims;
    if (given("--d0")) over["d0"] = f.d0;
    if (given("--wcl-alpha")) over["wcl_alpha"] = f.wcl_alpha;
    if (given("--eps")) over["eps"] = f.eps;
    if (given("--nmi")) over["nmi"] = f.nmi;
    cfg.overlay(over);
    if (f.jobs > 0) cfg.jobs = f.jobs;
    return cfg;
}

void add_pipeline_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--beta", f.beta, "Window slope beta");
    sub->add_option("--max-iters", f.max_iters, "Merge-and-split iteration cap");
    sub->add_flag("--random-init", f.random_init, "Random initial segmentation");
    sub->add_option("--seed", f.seed, "Seed for the random initialization");
    sub->add_option("--energy", f.energy, "Energy fraction for the subspace dimension rule");
    sub->add_option("--d-max", f.d_max, "Largest subspace dimension");
    sub->add_option("--dims", f.dims, "Explicit per-region subspace dimensions")->delimiter(',');
    sub->add_flag("--d0", f.d0, "Algorithm 1 only (zero-dimensional subspaces)");
    sub->add_option("--wcl-alpha", f.wcl_alpha, "WCL weight exponent");
    sub->add_option("--eps", f.eps, "Boundary tolerance fraction for E_eps");
    sub->add_option("--nmi", f.nmi, "NMI normalization: geometric or arithmetic");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Region-based radio map construction from sequential RSS streams"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config_path, "JSON config file (flags override it)");
    app.add_option("--jobs", f.jobs, "Worker thread cap")->check(CLI::PositiveNumber);
    app.add_flag("--print-config", f.print_config, "Print the resolved configuration and exit");

    std::string spec_path, out_dir;
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset bundle");
    gen->add_option("--spec", spec_path, "Spec JSON")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();

    std::string dataset, build_out;
    auto* build = app.add_subcommand("build", "Build a radio map from a dataset bundle");
    build->add_option("--dataset", dataset, "Dataset directory")->required();
    build->add_option("--out", build_out, "Output directory (default: the dataset directory)");
    add_pipeline_flags(build, f);

    std::string map_path, queries_path, loc_out;
    auto* loc = app.add_subcommand("localize", "Assign query RSS vectors to regions");
    loc->add_option("--map", map_path, "radiomap.json")->required();
    loc->add_option("--queries", queries_path, "Queries CSV (t,s1,...,sD)")->required();
    loc->add_option("--out", loc_out, "assignments.csv")->required();

    std::string eval_dataset, eval_map, eval_assign, eval_out;
    auto* eval = app.add_subcommand("evaluate", "Score a radio map against the dataset truth");
    eval->add_option("--dataset", eval_dataset, "Dataset directory")->required();
    eval->add_option("--map", eval_map, "radiomap.json")->required();
    eval->add_option("--assignments", eval_assign, "assignments.csv from localize");
    eval->add_option("--out", eval_out, "report.json")->required();
    add_pipeline_flags(eval, f);

    std::string check, params_text, table_path, curve_path, theory_out;
    auto* theory = app.add_subcommand("theory", "Run a named property check");
    theory->add_option("check", check, "Check name")->required();
    theory->add_option("--params", params_text, "JSON object overriding check parameters");
    theory->add_option("--table", table_path, "Write the per-seed table as CSV");
    theory->add_option("--curve", curve_path, "Write the scanned F(tau) curve as CSV");
    theory->add_option("--out", theory_out, "Write the verdict as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        CLI::App* active = build->parsed() ? build : (eval->parsed() ? eval : &app);
        PipelineConfig cfg = resolve(f, *active);
        if (f.print_config) {
            json spec_defaults = io::to_json(SynthSpec{});
            spec_defaults.erase("K");
            spec_defaults.erase("D");
            spec_defaults.erase("N");
            std::cout << json{{"pipeline", cfg.to_json()}, {"spec_defaults", spec_defaults},
                              {"spec_required", {"K", "D", "N"}}}
                             .dump(2)
                      << "\n";
            return 0;
        }
        if (gen->parsed()) {
            SynthSpec spec = io::spec_from_json(io::read_json(spec_path));
            if (auto s = env_seed()) spec.seed = *s;
            cmd_generate(spec, out_dir);
            return 0;
        }
        if (build->parsed()) return cmd_build(dataset, build_out.empty() ? dataset : build_out, cfg);
        if (loc->parsed()) return cmd_localize(map_path, queries_path, loc_out);
        if (eval->parsed()) {
            cmd_evaluate(eval_dataset, eval_map, eval_assign, eval_out, cfg, std::cerr);
            return 0;
        }
        if (theory->parsed()) {
            json params = params_text.empty() ? json::object() : json::parse(params_text);
            TheoryResult r = run_theory(check, params);
            std::string table = theory_table_csv(r);
            if (!table_path.empty()) io::write_text(table_path, table);
            else std::cout << table;
            if (!curve_path.empty()) {
                std::string c = "tau,F\n";
                for (auto [t, v] : r.curve) c += std::to_string(t) + "," + io::format_num(v) + "\n";
                io::write_text(curve_path, c);
            }
            json verdict{{"schema_version", io::kSchemaVersion},
                         {"config_hash", io::config_hash(json{{"check", check}, {"params", params}})},
                         {"check", check},
                         {"pass", r.pass},
                         {"summary", r.summary}};
            if (!theory_out.empty()) io::write_json(theory_out, verdict);
            std::cout << check << ": " << (r.pass ? "PASS" : "FAIL") << " " << r.summary.dump() << "\n";
            return r.pass ? 0 : 1;
        }
        std::cout << app.help();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
