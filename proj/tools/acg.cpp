// SPDX-License-Identifier: Apache-2.0
// Command-line driver: analyze a single program, benchmark a corpus,
// count segment-bound orderings, or run constraint-set saturation.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acg/engine.hpp"
#include "acg/lincons.hpp"
#include "acg/oracle.hpp"
#include "acg/parser.hpp"

namespace {

constexpr int kExitProved = 0;
constexpr int kExitUnknown = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

acg::AnalysisOptions make_options(const std::string& domain, const std::string& mode,
                                  int widen_delay, const std::string& relax) {
    acg::AnalysisOptions opts;
    opts.domain = domain == "interval" ? acg::DomainKind::Interval : acg::DomainKind::Dbm;
    opts.sparse = mode == "sparse";
    opts.widen_delay = widen_delay;
    opts.relax_mode = relax == "exact" ? acg::RelaxMode::Exact : acg::RelaxMode::Cheap;
    return opts;
}

/// CHECK lines in directive order; the counter is per label.
void print_verdicts(std::ostream& out, const acg::Program& p, const acg::AnalysisResult& r) {
    std::map<std::string, int> seq;
    for (size_t k = 0; k < p.checks.size(); ++k) {
        int n = ++seq[p.checks[k].at_label];
        out << "CHECK " << p.checks[k].at_label << "#" << n << ": "
            << acg::render_verdict(r.verdicts[k]) << "\n";
    }
}

bool all_proved(const acg::AnalysisResult& r) {
    for (auto v : r.verdicts)
        if (v != acg::Verdict::Proved) return false;
    return true;
}

int run_analyze(const std::string& file, const std::string& domain, const std::string& mode,
                int widen_delay, bool dump_states, bool oracle, const std::string& relax) {
    acg::Program p;
    try {
        p = acg::parse_program(read_file(file));
    } catch (const acg::ParseError& e) {
        std::cerr << "parse error at " << e.line() << ":" << e.col() << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    acg::AnalysisResult r;
    try {
        r = acg::analyze(p, make_options(domain, mode, widen_delay, relax));
    } catch (const std::exception& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitBudget;
    }

    print_verdicts(std::cout, p, r);
    std::cout << "TIME analyze " << std::fixed << std::setprecision(3) << r.stats.seconds
              << "\n";

    if (dump_states) {
        for (const auto& b : p.blocks) {
            auto it = r.states.find(b.label);
            std::cout << "STATE " << b.label << ":\n";
            if (it == r.states.end()) {
                std::cout << "  (unreached)\n";
            } else {
                std::cout << it->second.render() << "\n";
            }
        }
    }

    if (oracle) {
        acg::EnumReport rep = acg::soundness_enumerate(p, r);
        std::cout << "ORACLE violations=" << rep.violations.size()
                  << " states=" << rep.states_visited << (rep.capped ? " capped" : "") << "\n";
        for (const auto& v : rep.violations)
            std::cerr << "violation at " << v.block << ": " << v.state.render() << "\n";
    }

    return all_proved(r) ? kExitProved : kExitUnknown;
}

/// Corpus files in reporting order: the known benchmark names first, anything
/// else appended alphabetically.
std::vector<std::string> corpus_order(const std::string& dir) {
    static const std::vector<std::string> known = {
        "init",           "init_offset", "init_rand_2",     "init_rand_3",
        "init_rand_4",    "init_rand_5", "arraymax",        "copy",
        "partition_hoare", "partition_hp08", "sentinel",    "first_nonnull",
    };
    std::set<std::string> present;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".acg") present.insert(entry.path().stem().string());
    }
    std::vector<std::string> order;
    for (const auto& name : known)
        if (present.erase(name)) order.push_back(name);
    order.insert(order.end(), present.begin(), present.end());
    return order;
}

int run_bench(const std::string& dir) {
    std::vector<std::string> names;
    try {
        names = corpus_order(dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    if (names.empty()) {
        std::cerr << "no .acg files in " << dir << "\n";
        return kExitParse;
    }

    std::cout << std::left << std::setw(18) << "PROGRAM" << std::setw(10) << "NAIVE"
              << std::setw(10) << "TIME" << std::setw(10) << "SPARSE" << std::setw(10) << "TIME"
              << "\n";
    int worst = kExitProved;
    for (const auto& name : names) {
        std::string path = dir + "/" + name + ".acg";
        acg::Program p;
        try {
            p = acg::parse_program(read_file(path));
        } catch (const std::exception& e) {
            std::cerr << "parse error in " << path << ": " << e.what() << "\n";
            return kExitParse;
        }
        std::string cells[2];
        double secs[2];
        for (int sparse = 0; sparse < 2; ++sparse) {
            try {
                acg::AnalysisOptions opts;
                opts.sparse = sparse == 1;
                acg::AnalysisResult r = acg::analyze(p, opts);
                cells[sparse] = all_proved(r) ? "proved" : "unknown";
                secs[sparse] = r.stats.seconds;
            } catch (const std::exception& e) {
                std::cerr << "analysis failure in " << path << ": " << e.what() << "\n";
                cells[sparse] = "failed";
                secs[sparse] = 0.0;
                worst = kExitBudget;
            }
            if (cells[sparse] == "unknown" && worst == kExitProved) worst = kExitUnknown;
        }
        std::cout << std::left << std::setw(18) << name;
        for (int sparse = 0; sparse < 2; ++sparse) {
            std::ostringstream t;
            t << std::fixed << std::setprecision(3) << secs[sparse];
            std::cout << std::setw(10) << cells[sparse] << std::setw(10) << t.str();
        }
        std::cout << "\n";
    }
    return worst;
}

int run_orderings(int m, bool distinguish_zero) {
    acg::OrderingProblem prob;
    prob.m = m;
    prob.distinguish_zero = distinguish_zero;
    std::cout << acg::count_orderings(prob) << "\n";
    return 0;
}

/// Input: one constraint per line ('>=', '<=', '<', '>', '=' forms); '#'
/// starts a comment.  A line holding only '--' splits the interesting set
/// from the context set; with no separator every constraint is interesting.
int run_relax_poly(const std::string& file) {
    std::vector<acg::LinCons> interesting, other;
    bool in_other = false;
    try {
        std::istringstream in(read_file(file));
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            if (line == "--") {
                in_other = true;
                continue;
            }
            (in_other ? other : interesting).push_back(acg::parse_lincons(line));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    for (const auto& c : acg::trans_star(interesting, other)) std::cout << c.render() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Array content analysis over segment graphs"};
    app.require_subcommand(1);

    std::string file, domain = "dbm", mode = "naive", relax = "cheap", dir;
    int widen_delay = 2, m = 1;
    bool dump_states = false, oracle = false, distinguish_zero = false;

    auto* analyze = app.add_subcommand("analyze", "Analyze one program and check its directives");
    analyze->add_option("file", file)->required();
    analyze->add_option("--domain", domain)->check(CLI::IsMember({"interval", "dbm"}));
    analyze->add_option("--mode", mode)->check(CLI::IsMember({"naive", "sparse"}));
    analyze->add_option("--widen-delay", widen_delay)->check(CLI::NonNegativeNumber);
    analyze->add_flag("--dump-states", dump_states);
    analyze->add_flag("--oracle", oracle);
    analyze->add_option("--relax", relax)->check(CLI::IsMember({"exact", "cheap"}));

    auto* bench = app.add_subcommand("bench", "Run a corpus directory in both modes");
    bench->add_option("dir", dir)->required();

    auto* orderings = app.add_subcommand("orderings", "Count feasible segment-bound orderings");
    orderings->add_option("m", m)->required()->check(CLI::PositiveNumber);
    orderings->add_flag("--distinguish-zero", distinguish_zero);

    auto* relax_poly = app.add_subcommand("relax-poly", "Saturate a constraint list by resolution");
    relax_poly->add_option("file", file)->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(analyze))
        return run_analyze(file, domain, mode, widen_delay, dump_states, oracle, relax);
    if (app.got_subcommand(bench)) return run_bench(dir);
    if (app.got_subcommand(orderings)) return run_orderings(m, distinguish_zero);
    return run_relax_poly(file);
}
