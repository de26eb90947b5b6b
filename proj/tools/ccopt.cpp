#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccopt/io.hpp"

namespace {

using ccopt::json;

void emit(const std::string& text, const std::string& out_path) {
    const bool needs_newline = text.empty() || text.back() != '\n';
    if (out_path.empty()) {
        std::cout << text;
        if (needs_newline) std::cout << '\n';
    } else {
        ccopt::write_text_file(out_path, needs_newline ? text + "\n" : text);
    }
}

void emit(const json& j, const std::string& out_path) { emit(j.dump(2), out_path); }

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    bool schema = false;
};

std::uint64_t effective_seed(const GlobalOpts& g, std::uint64_t from_file) {
    return g.seed ? *g.seed : from_file;
}

ccopt::NetworkScenario load_scenario(const std::string& path, const GlobalOpts& g) {
    ccopt::NetworkScenario sc =
        ccopt::scenario_from_json(ccopt::parse_json(ccopt::read_text_file(path), path));
    sc.seed = effective_seed(g, sc.seed);
    if (sc.distances.empty())
        sc.distances = ccopt::generate_positions(sc.users, sc.cell_radius, sc.seed);
    return sc;
}

ccopt::PowerAllocation allocate(const ccopt::NetworkScenario& sc, ccopt::Scheme scheme) {
    const ccopt::FadingRealization fading = ccopt::sample_fading(sc);
    const ccopt::GainTable g = ccopt::effective_gain_table(sc, fading);
    switch (scheme) {
        case ccopt::Scheme::Optimal:
            return ccopt::constrained_allocation(g, sc.mux_dim(), sc.total_power,
                                                 sc.symbol_rate);
        case ccopt::Scheme::EqualRate:
            return ccopt::equal_rate_allocation(g, sc.total_power, sc.symbol_rate);
        case ccopt::Scheme::EqualPower:
            return ccopt::equal_power_allocation(g, sc.total_power, sc.symbol_rate);
    }
    throw ccopt::ConfigError("unhandled scheme");
}

json closed_form_report(const ccopt::ProblemInstance& inst, std::uint64_t seed) {
    inst.validate();
    if (inst.copies + inst.dim != inst.users)
        throw ccopt::ConfigError(
            "closed-form needs users == cache_copies + antennas_dim; use 'solve' otherwise");
    const ccopt::FeasibilityReport fr = ccopt::feasibility_check(inst.rates, inst.dim);
    json j;
    j["seed"] = seed;
    j["instance"] = ccopt::instance_to_json(inst);
    j["feasible"] = fr.feasible;
    j["rate_cap"] = fr.rate_cap;
    j["per_user_feasible"] = fr.per_user;
    if (!fr.feasible) {
        j["completion_time"] = ccopt::completion_time(inst.rates, inst.copies);
        return j;
    }
    const ccopt::ClosedFormSolution cf =
        ccopt::closed_form_solution(inst.rates, inst.dim, inst.copies);
    j["T"] = cf.total_time;
    j["q"] = cf.q;
    const ccopt::SectionLayout layout = ccopt::placement_for_closed_form(cf.q, inst.copies);
    const ccopt::SectionSet sections =
        ccopt::enumerate_sections(inst.users, inst.copies);
    std::map<std::vector<int>, double> by_support;
    for (const auto& seg : layout.segments) {
        std::vector<int> sup(seg.stored_at.begin(), seg.stored_at.end());
        by_support[sup] += seg.end - seg.begin;
    }
    json u = json::array();
    for (int l = 0; l < sections.count(); ++l) {
        const auto it = by_support.find(sections.support[l]);
        if (it == by_support.end() || it->second <= 0) continue;
        json e;
        e["support"] = sections.support[l];
        e["length"] = it->second;
        u.push_back(std::move(e));
    }
    j["u"] = std::move(u);
    json segs = json::array();
    for (const auto& seg : layout.segments) {
        json e;
        e["begin"] = seg.begin;
        e["end"] = seg.end;
        e["stored_at"] = std::vector<int>(seg.stored_at.begin(), seg.stored_at.end());
        segs.push_back(std::move(e));
    }
    j["placement_segments"] = std::move(segs);
    return j;
}

json verify_report(const std::string& path) {
    const ccopt::SolutionFile sf =
        ccopt::solution_from_json(ccopt::parse_json(ccopt::read_text_file(path), path));
    ccopt::VerificationReport rep =
        ccopt::verify_schedule(sf.instance, sf.u, sf.schedule, ccopt::RateModel::PerUser);
    double scheduled = 0;
    for (const auto& e : sf.schedule) scheduled += e.duration;
    if (std::abs(scheduled - sf.total_time) > 1e-5 * std::max(1.0, sf.total_time))
        rep.fail("schedule durations sum to " + std::to_string(scheduled) +
                 " but the file claims T=" + std::to_string(sf.total_time));
    json j;
    j["file"] = path;
    j["ok"] = rep.ok;
    j["issues"] = rep.issues;
    return j;
}

json all_schemas() {
    json j;
    j["instance"] = json::parse(ccopt::instance_schema());
    j["solution"] = json::parse(ccopt::solution_schema());
    j["scenario"] = json::parse(ccopt::scenario_schema());
    j["config"] = json::parse(ccopt::config_schema());
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded-caching delivery optimizer: LP scheduling, power allocation, "
                 "and Monte Carlo throughput studies"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    GlobalOpts g;
    std::uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "override every seed in inputs");
    app.add_flag("--schema", g.schema, "print the JSON document schemas and exit");

    // enumerate
    int en_users = 0, en_cache = 0, en_dim = 0;
    std::string en_out;
    auto* cmd_enum = app.add_subcommand("enumerate", "count sections, groups, and modes");
    cmd_enum->add_option("--users", en_users, "number of users")->required();
    cmd_enum->add_option("--cache", en_cache, "database copies across caches")->required();
    cmd_enum->add_option("--dim", en_dim, "spatial multiplexing dimension")->required();
    cmd_enum->add_option("--out", en_out, "write JSON here instead of stdout");

    // solve
    std::string so_instance, so_out;
    auto* cmd_solve = app.add_subcommand("solve", "minimize delivery time by LP");
    cmd_solve->add_option("--instance", so_instance, "instance JSON file")->required();
    cmd_solve->add_option("--out", so_out, "write solution JSON here instead of stdout");

    // closed-form
    std::string cf_instance, cf_out;
    auto* cmd_cf = app.add_subcommand("closed-form",
                                      "balanced-load solution for users == cache+dim");
    cmd_cf->add_option("--instance", cf_instance, "instance JSON file")->required();
    cmd_cf->add_option("--out", cf_out, "write JSON here instead of stdout");

    // power
    std::string pw_scenario, pw_scheme = "optimal", pw_out;
    auto* cmd_power = app.add_subcommand("power", "allocate transmit power over users");
    cmd_power->add_option("--scenario", pw_scenario, "scenario JSON file")->required();
    cmd_power->add_option("--scheme", pw_scheme, "optimal | equal_power | equal_rate");
    cmd_power->add_option("--out", pw_out, "write JSON here instead of stdout");

    // rates
    std::string rt_scenario, rt_scheme = "optimal", rt_out;
    auto* cmd_rates = app.add_subcommand("rates", "per-user power and rate table (CSV)");
    cmd_rates->add_option("--scenario", rt_scenario, "scenario JSON file")->required();
    cmd_rates->add_option("--scheme", rt_scheme, "optimal | equal_power | equal_rate");
    cmd_rates->add_option("--out", rt_out, "write CSV here instead of stdout");

    // compare
    std::string cp_instance, cp_out;
    auto* cmd_cmp = app.add_subcommand("compare",
                                       "optimal vs min-rate comparison scheme");
    cmd_cmp->add_option("--instance", cp_instance, "instance JSON file")->required();
    cmd_cmp->add_option("--out", cp_out, "write JSON here instead of stdout");

    // simulate
    std::string sim_config, sim_out_dir = ".";
    int sim_realizations = 0;
    bool sim_full = false;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo throughput study");
    cmd_sim->add_option("--config", sim_config, "experiment config JSON file")->required();
    cmd_sim->add_option("--out-dir", sim_out_dir, "directory for CSV and SVG outputs");
    cmd_sim->add_option("--realizations", sim_realizations, "override realization count");
    cmd_sim->add_flag("--full", sim_full, "survey-scale run (1000 realizations)");

    // verify
    std::string vf_solution;
    auto* cmd_verify = app.add_subcommand("verify", "check a solution file");
    cmd_verify->add_option("--solution", vf_solution, "solution JSON file")->required();

    try {
        app.parse(argc, argv);
        if (seed_flag->count()) g.seed = seed_opt;

        if (g.schema) {
            std::cout << all_schemas().dump(2) << '\n';
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }

        if (cmd_enum->parsed()) {
            const std::uint64_t L = ccopt::binomial(en_users, en_cache);
            const std::uint64_t C = ccopt::binomial(en_users, en_cache + en_dim);
            const std::uint64_t J = ccopt::checked_pow(
                ccopt::binomial(en_cache + en_dim - 1, en_cache),
                static_cast<unsigned>(en_cache + en_dim));
            json j;
            j["users"] = en_users;
            j["cache_copies"] = en_cache;
            j["antennas_dim"] = en_dim;
            j["sections"] = L;
            j["combinations"] = C;
            j["modes_per_combination"] = J;
            j["variables"] = ccopt::variable_count(en_users, en_cache, en_dim);
            j["constraints"] = ccopt::constraint_count(en_users, en_cache);
            emit(j, en_out);
        } else if (cmd_solve->parsed()) {
            const ccopt::ProblemInstance inst = ccopt::instance_from_json(
                ccopt::parse_json(ccopt::read_text_file(so_instance), so_instance));
            const ccopt::DeliverySolution sol = ccopt::solve_delivery(inst);
            emit(ccopt::solution_to_json(sol, effective_seed(g, 1)), so_out);
        } else if (cmd_cf->parsed()) {
            const ccopt::ProblemInstance inst = ccopt::instance_from_json(
                ccopt::parse_json(ccopt::read_text_file(cf_instance), cf_instance));
            const json j = closed_form_report(inst, effective_seed(g, 1));
            emit(j, cf_out);
            if (!j["feasible"].get<bool>()) {
                std::cerr << "rate profile violates the per-user cap; no balanced-load "
                             "solution (see completion_time and the LP solver)\n";
                return 1;
            }
        } else if (cmd_power->parsed()) {
            const ccopt::NetworkScenario sc = load_scenario(pw_scenario, g);
            const ccopt::Scheme scheme = ccopt::scheme_from_string(pw_scheme);
            emit(ccopt::allocation_to_json(sc, allocate(sc, scheme), pw_scheme), pw_out);
        } else if (cmd_rates->parsed()) {
            const ccopt::NetworkScenario sc = load_scenario(rt_scenario, g);
            const ccopt::Scheme scheme = ccopt::scheme_from_string(rt_scheme);
            emit(ccopt::rates_csv(sc, allocate(sc, scheme)), rt_out);
        } else if (cmd_cmp->parsed()) {
            const ccopt::ProblemInstance inst = ccopt::instance_from_json(
                ccopt::parse_json(ccopt::read_text_file(cp_instance), cp_instance));
            const ccopt::ComparisonReport rep = ccopt::compare(inst);
            json j;
            j["seed"] = effective_seed(g, 1);
            j["instance"] = ccopt::instance_to_json(inst);
            j["T_optimal"] = rep.t_optimal;
            j["T_min_rate"] = rep.t_min_rate;
            j["T_min_rate_free_placement"] = rep.t_min_rate_free;
            j["ratio"] = rep.ratio;
            j["ratio_free_placement"] = rep.ratio_free;
            emit(j, cp_out);
        } else if (cmd_sim->parsed()) {
            ccopt::ExperimentConfig cfg = ccopt::experiment_config_from_json(
                ccopt::parse_json(ccopt::read_text_file(sim_config), sim_config));
            if (g.seed) cfg.seed = *g.seed;
            if (sim_full) cfg.realizations = 1000;
            if (sim_realizations > 0) cfg.realizations = sim_realizations;
            cfg.validate();
            const std::vector<ccopt::ThroughputRecord> records = ccopt::run_experiments(cfg);
            for (const auto& r : records) {
                const int total = r.realizations + r.failures;
                if (total > 0 && r.failures * 100 > total)
                    std::cerr << "warning: " << r.failures << "/" << total
                              << " realizations failed at scheme=" << ccopt::to_string(r.scheme)
                              << " M=" << r.cache_size << " alpha=" << r.alpha
                              << " snr=" << r.edge_snr_db << " dB\n";
            }
            ccopt::emit_outputs(records, sim_out_dir);
            std::cout << "wrote throughput.csv, normalized.csv, fig2.svg, fig3.svg, fig4.svg"
                      << " to " << sim_out_dir << '\n';
        } else if (cmd_verify->parsed()) {
            const json j = verify_report(vf_solution);
            std::cout << j.dump(2) << '\n';
            if (!j["ok"].get<bool>()) return 1;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help, --version
        app.exit(e);
        return 2;
    } catch (const ccopt::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ccopt::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 1;
    } catch (const ccopt::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
