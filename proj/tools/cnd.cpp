// cnd: command-line front end for the CNOT-dihedral group library.
// Subcommands: order, sample, compose, invert, synth, eval, twirl, rb.
// All numerical output is JSON or CSV; errors go to stderr as JSON and the
// exit code is nonzero. Every randomized subcommand echoes its seed.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "cnotdihedral/circuit.hpp"
#include "cnotdihedral/json_io.hpp"
#include "cnotdihedral/rb.hpp"
#include "cnotdihedral/unitary.hpp"

using namespace cnotdihedral;

namespace {

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << data;
}

// Accepts either a bare element document or a `sample` output document (in
// which case the first element is taken).
CNOTDihedralElement element_from_input(const std::string& path) {
    json doc = json::parse(read_input(path));
    if (doc.contains("elements")) {
        const auto& elems = doc.at("elements");
        if (elems.empty()) throw std::invalid_argument("sample document has no elements");
        return element_from_json(elems.at(0));
    }
    return element_from_json(doc);
}

uint64_t resolve_seed(std::optional<uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (uint64_t(rd()) << 32) | rd();
}

json fit_to_json(const RBFit& fit) {
    json per_state = json::array();
    for (const auto& sf : fit.per_state) {
        per_state.push_back({{"state", sf.state},
                             {"amplitude", sf.fit.amplitude},
                             {"alpha", sf.fit.alpha},
                             {"offset", sf.fit.offset},
                             {"amplitude_se", sf.fit.amplitude_se},
                             {"alpha_se", sf.fit.alpha_se},
                             {"offset_se", sf.fit.offset_se},
                             {"chi2_per_dof", sf.fit.chi2_per_dof},
                             {"degenerate", sf.fit.degenerate},
                             {"deviation_flag", sf.deviation_flag}});
    }
    json out{{"per_state", per_state}};
    if (fit.alpha_z) out["alpha_z"] = *fit.alpha_z;
    if (fit.alpha_r) out["alpha_r"] = *fit.alpha_r;
    if (fit.alpha_z_se) out["alpha_z_se"] = *fit.alpha_z_se;
    if (fit.alpha_r_se) out["alpha_r_se"] = *fit.alpha_r_se;
    if (fit.alpha) out["alpha"] = *fit.alpha;
    if (fit.r) out["r"] = *fit.r;
    return out;
}

RBConfig rb_config_from_json(const json& j) {
    RBConfig cfg;
    cfg.params = GroupParams(j.at("n").get<int>(), j.at("k").get<int>());
    cfg.lengths = j.at("lengths").get<std::vector<int>>();
    cfg.sequences_per_length = j.value("sequences_per_length", 30);
    for (const auto& name : j.value("states", std::vector<std::string>{"zeros", "plus"})) {
        if (name == "zeros") cfg.states.push_back(zeros_input(cfg.params.n));
        else if (name == "plus") cfg.states.push_back(plus_input(cfg.params.n));
        else throw std::invalid_argument("unknown input state '" + name + "'");
    }
    if (j.contains("noise")) cfg.noise = pauli_channel_from_json(j.at("noise"));
    if (j.contains("interleaved")) cfg.interleaved = element_from_json(j.at("interleaved"));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    std::string mode = j.value("mode", "density");
    if (mode == "density") cfg.mode = SimMode::Density;
    else if (mode == "trajectory") cfg.mode = SimMode::Trajectory;
    else throw std::invalid_argument("mode must be 'density' or 'trajectory'");
    cfg.threads = j.value("threads", 1);
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"CNOT-dihedral group computations"};
    app.require_subcommand(1);

    // order
    int o_n = 1;
    uint64_t o_m = 2;
    bool o_enum = false;
    uint64_t o_budget = 10'000'000;
    auto* order_cmd = app.add_subcommand("order", "Print the order of G_m on n qubits");
    order_cmd->add_option("-n", o_n, "number of qubits")->required();
    order_cmd->add_option("-m", o_m, "phase modulus m")->required();
    order_cmd->add_flag("--enumerate", o_enum, "cross-check by BFS enumeration");
    order_cmd->add_option("--budget", o_budget, "enumeration budget");

    // sample
    int s_n = 1, s_k = 1, s_count = 1;
    std::optional<uint64_t> s_seed;
    std::string s_out;
    auto* sample_cmd = app.add_subcommand("sample", "Sample uniform group elements");
    sample_cmd->add_option("-n", s_n, "number of qubits")->required();
    sample_cmd->add_option("-k", s_k, "phase precision k (m = 2^k)")->required();
    sample_cmd->add_option("--count", s_count, "number of samples");
    sample_cmd->add_option("--seed", s_seed, "RNG seed (default: entropy)");
    sample_cmd->add_option("-o,--output", s_out, "output path (default stdout)");

    // compose
    std::vector<std::string> c_files;
    std::string c_out;
    auto* compose_cmd =
        app.add_subcommand("compose", "Compose element JSON files, first argument acts first");
    compose_cmd->add_option("files", c_files, "element JSON files")->expected(-2);
    compose_cmd->add_option("-o,--output", c_out, "output path (default stdout)");

    // invert
    std::string i_file, i_out;
    auto* invert_cmd = app.add_subcommand("invert", "Invert an element JSON document");
    invert_cmd->add_option("file", i_file, "element JSON file ('-' for stdin)");
    invert_cmd->add_option("-o,--output", i_out, "output path (default stdout)");

    // synth
    std::string sy_file, sy_out;
    bool sy_named = false;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a circuit for an element");
    synth_cmd->add_option("file", sy_file, "element JSON file ('-' for stdin)");
    synth_cmd->add_flag("--named", sy_named, "use t/s/z gate names when k = 3");
    synth_cmd->add_option("-o,--output", sy_out, "output path (default stdout)");

    // eval
    std::string e_file, e_out;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a circuit text file to an element");
    eval_cmd->add_option("file", e_file, "circuit text file ('-' for stdin)");
    eval_cmd->add_option("-o,--output", e_out, "output path (default stdout)");

    // twirl
    std::string t_channel, t_mode = "full", t_out;
    int t_n = 1, t_k = 1, t_threads = 1;
    uint64_t t_budget = 10'000;
    auto* twirl_cmd = app.add_subcommand("twirl", "Group-twirl a channel");
    twirl_cmd->add_option("--channel", t_channel, "channel JSON (pauli-channel or liouville)")
        ->required();
    twirl_cmd->add_option("-n", t_n, "number of qubits")->required();
    twirl_cmd->add_option("-k", t_k, "phase precision k")->required();
    twirl_cmd->add_option("--mode", t_mode, "full or sequential")
        ->check(CLI::IsMember({"full", "sequential"}));
    twirl_cmd->add_option("--budget", t_budget, "full-twirl group order budget");
    twirl_cmd->add_option("--threads", t_threads, "reserved; output independent of value");
    twirl_cmd->add_option("-o,--output", t_out, "output path (default stdout)");

    // rb
    std::string r_config, r_csv, r_out;
    std::optional<uint64_t> r_seed;
    std::optional<int> r_threads;
    bool r_generate_only = false;
    auto* rb_cmd = app.add_subcommand("rb", "Run the randomized-benchmarking pipeline");
    rb_cmd->add_option("--config", r_config, "RB config JSON file")->required();
    rb_cmd->add_option("--seed", r_seed, "override the config seed");
    rb_cmd->add_option("--threads", r_threads, "worker threads (output independent of value)");
    rb_cmd->add_option("--csv", r_csv, "write the dataset CSV to this path");
    rb_cmd->add_flag("--generate-only", r_generate_only,
                     "emit sequence circuits without simulating");
    rb_cmd->add_option("-o,--output", r_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        json err{{"error", {{"type", "cli"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return e.get_exit_code();
    }

    if (*order_cmd) {
        BigInt order = group_order(o_n, BigInt(o_m));
        json out{{"schema", "cnotdihedral/order/v1"},
                 {"n", o_n},
                 {"m", o_m},
                 {"order", order.str()}};
        if (o_enum) {
            BigInt counted = enumerate_group(o_n, int(o_m), BigInt(o_budget)).count;
            out["enumerated"] = counted.str();
            if (counted != order) throw std::logic_error("enumeration disagrees with formula");
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    if (*sample_cmd) {
        uint64_t seed = resolve_seed(s_seed);
        std::mt19937_64 rng(seed);
        GroupParams params(s_n, s_k);
        json elements = json::array();
        for (int i = 0; i < s_count; ++i) elements.push_back(to_json(sample_uniform(params, rng)));
        json out{{"schema", "cnotdihedral/sample/v1"},
                 {"n", s_n},
                 {"k", s_k},
                 {"seed", seed},
                 {"elements", elements}};
        write_output(s_out, out.dump(2) + "\n");
        return 0;
    }
    if (*compose_cmd) {
        CNOTDihedralElement product = element_from_input(c_files[0]);
        for (size_t i = 1; i < c_files.size(); ++i) {
            CNOTDihedralElement g = element_from_input(c_files[i]);
            product = multiply(g, product);
        }
        write_output(c_out, to_json(product).dump(2) + "\n");
        return 0;
    }
    if (*invert_cmd) {
        CNOTDihedralElement g = element_from_input(i_file);
        write_output(i_out, to_json(inverse(g)).dump(2) + "\n");
        return 0;
    }
    if (*synth_cmd) {
        CNOTDihedralElement g = element_from_input(sy_file);
        write_output(sy_out, export_text(synthesize(g), sy_named));
        return 0;
    }
    if (*eval_cmd) {
        Circuit circ = parse_text(read_input(e_file));
        write_output(e_out, to_json(evaluate_circuit(circ)).dump(2) + "\n");
        return 0;
    }
    if (*twirl_cmd) {
        GroupParams params(t_n, t_k);
        json doc = json::parse(read_input(t_channel));
        std::string schema = doc.value("schema", "");
        LiouvilleRep twirled;
        if (t_mode == "sequential") {
            if (schema != "cnotdihedral/pauli-channel/v1")
                throw std::invalid_argument("sequential twirl requires a pauli-channel input");
            twirled = twirl_sequential(pauli_channel_from_json(doc), params);
        } else {
            LiouvilleRep rep;
            if (schema == "cnotdihedral/pauli-channel/v1")
                rep = liouville_of_pauli_channel(pauli_channel_from_json(doc));
            else if (schema == "cnotdihedral/liouville/v1")
                rep = liouville_from_json(doc);
            else
                throw std::invalid_argument("unrecognized channel schema '" + schema + "'");
            twirled = twirl_full(rep, params, BigInt(t_budget));
        }
        TwirlSummary s = summarize_twirl(twirled);
        json out{{"schema", "cnotdihedral/twirl/v1"},
                 {"n", t_n},
                 {"k", t_k},
                 {"mode", t_mode},
                 {"alpha_z", s.alpha_z},
                 {"alpha_r", s.alpha_r},
                 {"alpha", s.alpha},
                 {"r", s.r},
                 {"max_offdiag", s.max_offdiag},
                 {"liouville", to_json(twirled)}};
        write_output(t_out, out.dump(2) + "\n");
        return 0;
    }
    if (*rb_cmd) {
        json cfg_doc = json::parse(read_input(r_config));
        RBConfig cfg = rb_config_from_json(cfg_doc);
        if (r_seed) cfg.seed = *r_seed;
        if (r_threads) cfg.threads = *r_threads;
        cfg.validate();

        if (r_generate_only) {
            auto seqs = generate_sequences(cfg);
            std::ostringstream out;
            for (size_t li = 0; li < seqs.size(); ++li) {
                for (size_t si = 0; si < seqs[li].size(); ++si) {
                    const RBSequence& seq = seqs[li][si];
                    out << "# length=" << cfg.lengths[li] << " seq=" << si
                        << " seed=" << cfg.seed << "\n";
                    Circuit all{cfg.params.n, cfg.params.k, {}};
                    for (const auto& g : seq.elements) {
                        Circuit c = synthesize(g);
                        all.gates.insert(all.gates.end(), c.gates.begin(), c.gates.end());
                    }
                    Circuit rec = synthesize(seq.recovery);
                    all.gates.insert(all.gates.end(), rec.gates.begin(), rec.gates.end());
                    out << export_text(all);
                }
            }
            write_output(r_out, out.str());
            return 0;
        }

        RBDataset ds = estimate_sequence_fidelity(cfg);
        if (!r_csv.empty()) write_output(r_csv, dataset_csv(ds));
        RBFit fit;
        bool fit_ok = true;
        std::string fit_error;
        try {
            fit = fit_decay(ds);
        } catch (const std::exception& e) {
            fit_ok = false;
            fit_error = e.what();
        }
        json out{{"schema", "cnotdihedral/rb-result/v1"},
                 {"n", cfg.params.n},
                 {"k", cfg.params.k},
                 {"seed", cfg.seed},
                 {"lengths", cfg.lengths},
                 {"sequences_per_length", cfg.sequences_per_length},
                 {"mode", cfg.mode == SimMode::Density ? "density" : "trajectory"}};
        if (fit_ok) out["fit"] = fit_to_json(fit);
        else out["fit_error"] = fit_error;
        write_output(r_out, out.dump(2) + "\n");
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        json err{{"error", {{"type", "runtime"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
