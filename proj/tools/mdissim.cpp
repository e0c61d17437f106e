// Command-line front end. Exit status: 0 success or "yes", 1 a mathematical
// "no" (witness on stdout), 2 usage or input errors.

#include "mdissim/mdissim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace mdissim;

namespace {

constexpr int exit_yes = 0;
constexpr int exit_no = 1;
constexpr int exit_usage = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw usage_error("cannot write '" + path + "'");
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

WeightedTree load_tree(const std::string& path) { return parse_newick(read_input(path)); }
DistanceMatrix load_matrix(const std::string& path) { return distance_matrix_from_json(detail::parse_text(read_input(path))); }
DissimTensor load_tensor(const std::string& path) { return tensor_from_json(detail::parse_text(read_input(path))); }

int report(const Verdict& v, const std::string& what) {
    std::cerr << what << ": " << describe(v) << "\n";
    std::cout << dump(to_json(v));
    return v.pass ? exit_yes : exit_no;
}

// ---------------------------------------------------------------- subcommands

struct DissimArgs {
    std::string tree, out;
    int m = 3;
    bool oracle = false;
    unsigned jobs = 1;
};

int run_dissim(const DissimArgs& a) {
    WeightedTree t = load_tree(a.tree);
    if (a.m < 2 || a.m > t.leaf_count())
        throw usage_error("--m must lie in [2, " + std::to_string(t.leaf_count()) + "]");
    DissimTensor w = phi_m(distance_matrix(t), a.m, PhiOptions{PhiMethod::automatic, a.jobs, 6});
    if (a.oracle) {
        std::optional<Subset> mismatch;
        for_each_subset(t.leaf_count(), a.m, [&](const Subset& s) {
            if (w(s) == steiner_weight(t, s)) return true;
            mismatch = s;
            return false;
        });
        if (mismatch) {
            Witness wit{{}, *mismatch, {w(*mismatch), steiner_weight(t, *mismatch)}};
            return report(Verdict::fail(wit, "tour formula differs from subtree weight"), "oracle");
        }
        std::cerr << "oracle: all " << w.entry_count() << " entries equal the subtree weights\n";
    }
    write_output(a.out, dump(to_json(w)));
    return exit_yes;
}

struct CheckArgs {
    std::string file;
    bool metric = false, ultra = false, m4 = false, in_l = false, strict = false;
    int tmn = 0;
    unsigned jobs = 1;
};

ojson m4_json(const M4Report& r) {
    ojson rows = ojson::array();
    std::optional<std::array<int, 4>> first_bad;
    for (const auto& row : r.rows) {
        if (!row.max_twice && !first_bad) first_bad = row.quadruple;
        rows.push_back(ojson{{"quadruple", row.quadruple},
                             {"sums", {to_string(row.sums[0]), to_string(row.sums[1]), to_string(row.sums[2])}},
                             {"max_twice", row.max_twice},
                             {"coordinates_equal", row.coordinates_equal},
                             {"min_identity", row.min_identity}});
    }
    ojson out{{"pass", r.all_pass}, {"equivalent", r.all_equivalent}};
    out["witness"] = first_bad ? ojson{{"indices", *first_bad}} : ojson(nullptr);
    out["rows"] = std::move(rows);
    return out;
}

int run_check(const CheckArgs& a) {
    int modes = a.metric + a.ultra + a.m4 + a.in_l + (a.tmn != 0);
    if (modes != 1) throw usage_error("choose exactly one of --metric, --ultra, --tmn M, --m4, --in-l");
    if (a.metric) return report(four_point_check(load_matrix(a.file), a.strict), "four-point");
    if (a.ultra) return report(is_ultrametric(load_matrix(a.file)), "ultrametric");
    if (a.in_l) return report(in_L(pi_point_from_json(detail::parse_text(read_input(a.file)))), "coincidence");
    if (a.m4) {
        M4Report r = verify_m4_characterization(load_matrix(a.file));
        std::cerr << "order-4 characterisation: " << (r.all_pass ? "four-point holds" : "four-point fails")
                  << (r.all_equivalent ? ", equivalence holds on every quadruple" : ", EQUIVALENCE BROKEN") << "\n";
        std::cout << dump(m4_json(r));
        return r.all_pass && r.all_equivalent ? exit_yes : exit_no;
    }
    DissimTensor w = load_tensor(a.file);
    if (w.order() != a.tmn)
        throw usage_error("tensor has m=" + std::to_string(w.order()) + " but --tmn " + std::to_string(a.tmn));
    return report(in_Tmn(w, a.jobs), "three-term Plücker");
}

int run_membership3(const std::string& file) {
    DissimTensor w = load_tensor(file);
    if (w.order() != 3) throw usage_error("membership3 needs a tensor with m=3");
    if (w.size() < 5) throw usage_error("membership3 needs n >= 5");
    Membership3 r = membership3(w);
    static const char* stages[] = {"not_in_image", "four_point_failure", "member"};
    ojson out{{"member", r.member}, {"stage", stages[static_cast<int>(r.stage)]}, {"verdict", to_json(r.verdict)}};
    if (r.matrix) out["matrix"] = to_json(*r.matrix);
    out["newick"] = r.tree ? ojson(serialize_newick(*r.tree)) : ojson(nullptr);
    out["cross_check"] = r.cross_check;
    std::cerr << "membership3: " << (r.member ? "yes" : "no") << " (" << stages[static_cast<int>(r.stage)] << ")\n";
    if (!r.cross_check) std::cerr << "membership3: warning: Plücker cross-check disagrees\n";
    std::cout << dump(out);
    return r.member ? exit_yes : exit_no;
}

int run_certify3(const std::string& tree_file, const std::string& out_file, unsigned jobs) {
    WeightedTree t = load_tree(tree_file);
    if (t.leaf_count() < 3) throw usage_error("certify3 needs at least 3 leaves");
    if (!t.strictly_positive()) throw usage_error("certify3 needs strictly positive edge weights");
    Certificate3 c = build_certificate(t);
    DissimTensor w = phi_3(distance_matrix(t));
    std::ostringstream table;
    bool ok = true;
    for (const auto& row : certificate_table(c, w, jobs)) {
        table << row.triple[0] << "," << row.triple[1] << "," << row.triple[2] << ": " << to_string(row.expected)
              << (row.holds() ? " = " : " != ") << (row.neg_val ? to_string(*row.neg_val) : "inf") << "\n";
        ok = ok && row.holds();
    }
    if (out_file.empty()) {
        std::cout << dump(to_json(c));
        std::cerr << table.str();
    } else {
        write_output(out_file, dump(to_json(c)));
        std::cout << table.str();
    }
    return ok ? exit_yes : exit_no;
}

int run_random_tree(int n, std::uint64_t seed, const std::string& shape, long max_num, long max_den) {
    if (n < 3) throw usage_error("--n must be at least 3");
    if (max_num < 1 || max_den < 1) throw usage_error("weight bounds must be positive");
    TreeShape s = shape == "caterpillar" ? TreeShape::caterpillar : TreeShape::uniform_topology;
    std::cout << serialize_newick(random_tree(n, seed, s, WeightSampler{max_num, max_den, false})) << "\n";
    return exit_yes;
}

int run_count(int n, int cap) {
    if (n < 3 || n > cap) throw usage_error("--n must lie in [3, " + std::to_string(cap) + "]");
    TopologyIterator it = enumerate_topologies(n, cap);
    std::uint64_t count = 0;
    while (it.next()) ++count;
    std::cout << count << "\n";
    return exit_yes;
}

int run_reconstruct(const std::string& file) {
    DistanceMatrix d = load_matrix(file);
    Verdict v = four_point_check(d, false);
    if (!v) return report(v, "reconstruct");
    std::cout << serialize_newick(reconstruct_tree(d)) << "\n";
    return exit_yes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact tree dissimilarity maps, tropical membership tests and valuation certificates"};
    app.require_subcommand(1);

    DissimArgs dissim_args;
    auto* dissim = app.add_subcommand("dissim", "m-dissimilarity tensor of a Newick tree");
    dissim->add_option("--tree", dissim_args.tree, "Newick file ('-' for stdin)")->required();
    dissim->add_option("--m", dissim_args.m, "subset size")->required();
    dissim->add_option("--out", dissim_args.out, "output file (default stdout)");
    dissim->add_flag("--oracle", dissim_args.oracle, "recompute every entry as a subtree weight and compare");
    dissim->add_option("--jobs", dissim_args.jobs, "worker threads")->check(CLI::PositiveNumber);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "test a matrix, tensor or pairing point");
    check->add_option("file", check_args.file, "JSON input ('-' for stdin)")->required();
    check->add_flag("--metric", check_args.metric, "four-point condition on a distance matrix");
    check->add_flag("--ultra", check_args.ultra, "ultrametric condition on a distance matrix");
    check->add_option("--tmn", check_args.tmn, "three-term Plücker condition on an order-M tensor")
        ->check(CLI::Range(2, 64));
    check->add_flag("--m4", check_args.m4, "order-4 pairing-coordinate characterisation of a distance matrix");
    check->add_flag("--in-l", check_args.in_l, "coincidence of pairing coordinates in a pairing-point file");
    check->add_flag("--strict", check_args.strict, "with --metric: distinct quadruples only");
    check->add_option("--jobs", check_args.jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string membership_file;
    auto* membership = app.add_subcommand("membership3", "decide whether an order-3 tensor comes from a tree");
    membership->add_option("file", membership_file, "tensor JSON ('-' for stdin)")->required();

    std::string certify_tree, certify_out;
    unsigned certify_jobs = 1;
    auto* certify = app.add_subcommand("certify3", "valuation certificate for the order-3 map of a tree");
    certify->add_option("--tree", certify_tree, "Newick file ('-' for stdin)")->required();
    certify->add_option("--out", certify_out, "certificate file; the check table then goes to stdout");
    certify->add_option("--jobs", certify_jobs, "worker threads")->check(CLI::PositiveNumber);

    int random_n = 0;
    std::uint64_t random_seed = 0;
    std::string random_shape = "uniform";
    long max_num = 10, max_den = 4;
    auto* random = app.add_subcommand("random-tree", "seeded random binary tree in Newick");
    random->add_option("--n", random_n, "number of leaves")->required();
    random->add_option("--seed", random_seed, "64-bit seed")->required();
    random->add_option("--shape", random_shape, "uniform or caterpillar")
        ->check(CLI::IsMember({"uniform", "caterpillar"}));
    random->add_option("--max-numerator", max_num, "weights are p/q with 1 <= p <= this");
    random->add_option("--max-denominator", max_den, "weights are p/q with 1 <= q <= this");

    int count_n = 0, count_cap = TopologyIterator::default_cap;
    auto* count = app.add_subcommand("count-topologies", "enumerate unrooted binary topologies and count them");
    count->add_option("--n", count_n, "number of leaves")->required();
    count->add_option("--cap", count_cap, "largest n accepted");

    std::string reconstruct_file;
    auto* reconstruct = app.add_subcommand("reconstruct", "tree realising a distance matrix, in Newick");
    reconstruct->add_option("file", reconstruct_file, "distance matrix JSON ('-' for stdin)")->required();

    std::string distances_tree;
    auto* distances = app.add_subcommand("distances", "distance matrix of a Newick tree");
    distances->add_option("--tree", distances_tree, "Newick file ('-' for stdin)")->required();

    std::string pi_file;
    auto* pi = app.add_subcommand("pi4", "pairing coordinates of a distance matrix");
    pi->add_option("file", pi_file, "distance matrix JSON ('-' for stdin)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_yes : exit_usage;
    }

    try {
        if (*dissim) return run_dissim(dissim_args);
        if (*check) return run_check(check_args);
        if (*membership) return run_membership3(membership_file);
        if (*certify) return run_certify3(certify_tree, certify_out, certify_jobs);
        if (*random) return run_random_tree(random_n, random_seed, random_shape, max_num, max_den);
        if (*count) return run_count(count_n, count_cap);
        if (*reconstruct) return run_reconstruct(reconstruct_file);
        if (*distances) {
            std::cout << dump(to_json(distance_matrix(load_tree(distances_tree))));
            return exit_yes;
        }
        if (*pi) {
            std::cout << dump(to_json(pi4(load_matrix(pi_file))));
            return exit_yes;
        }
    } catch (const verdict_error& e) {
        return report(e.verdict(), e.what());
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const newick_error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return exit_usage;
}
