#include "pbit/experiment.hpp"

#include "pbit/anneal.hpp"
#include "pbit/errors.hpp"
#include "pbit/io.hpp"
#include "pbit/learning.hpp"
#include "pbit/parallel.hpp"
#include "pbit/problems.hpp"
#include "pbit/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace pbit {

namespace {

using nlohmann::json;

// Strict object view: every field must be consumed, unknown fields are
// configuration errors with a field path in the message.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw config_error(path_ + ": expected an object");
    }

    bool has(const char* key) {
        used_.insert(key);
        return j_.contains(key);
    }

    const json& req(const char* key) {
        used_.insert(key);
        if (!j_.contains(key)) throw config_error(path_ + ": missing field '" + key + "'");
        return j_.at(key);
    }

    const json* opt(const char* key) {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string where(const char* key) const { return path_ + "." + key; }

    void done() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.contains(k)) throw config_error(path_ + ": unknown field '" + k + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::int64_t as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw config_error(where + ": expected an integer");
    return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw config_error(where + ": expected a non-negative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0 && !v.is_number_unsigned())
        throw config_error(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

double as_num(const json& v, const std::string& where) {
    if (!v.is_number()) throw config_error(where + ": expected a number");
    return v.get<double>();
}

std::string as_str(const json& v, const std::string& where) {
    if (!v.is_string()) throw config_error(where + ": expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) throw config_error(where + ": expected a boolean");
    return v.get<bool>();
}

std::vector<int> as_int_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error(where + ": expected an array");
    std::vector<int> out;
    for (const auto& e : v) out.push_back(static_cast<int>(as_int(e, where)));
    return out;
}

std::shared_ptr<const ChimeraTopology> parse_topology(const json& j) {
    Fields f(j, "topology");
    const int rows = static_cast<int>(as_int(f.req("rows"), f.where("rows")));
    const int cols = static_cast<int>(as_int(f.req("cols"), f.where("cols")));
    const int shore = static_cast<int>(as_int(f.req("shore_size"), f.where("shore_size")));
    std::vector<CellCoord> disabled;
    if (const json* d = f.opt("disabled_cells")) {
        if (!d->is_array()) throw config_error("topology.disabled_cells: expected an array");
        for (const auto& c : *d) {
            if (!c.is_array() || c.size() != 2)
                throw config_error("topology.disabled_cells: entries must be [row, col]");
            disabled.push_back({static_cast<int>(as_int(c.at(0), "topology.disabled_cells")),
                                static_cast<int>(as_int(c.at(1), "topology.disabled_cells"))});
        }
    }
    f.done();
    return std::make_shared<const ChimeraTopology>(rows, cols, shore, disabled);
}

HardwareProfile parse_hardware(const json& j) {
    Fields f(j, "hardware");
    HardwareProfile hw;
    if (const json* v = f.opt("rng")) {
        const std::string s = as_str(*v, f.where("rng"));
        if (s == "ideal")
            hw.rng_source = RngSource::Ideal;
        else if (s == "lfsr")
            hw.rng_source = RngSource::Lfsr;
        else
            throw config_error("hardware.rng: must be 'ideal' or 'lfsr'");
    }
    if (const json* v = f.opt("dac_bits")) hw.dac_bits = static_cast<int>(as_int(*v, f.where("dac_bits")));
    if (const json* v = f.opt("gain_sigma")) hw.gain_sigma = as_num(*v, f.where("gain_sigma"));
    if (const json* v = f.opt("offset_sigma")) hw.offset_sigma = as_num(*v, f.where("offset_sigma"));
    if (const json* v = f.opt("mismatch_seed")) hw.mismatch_seed = as_uint(*v, f.where("mismatch_seed"));
    f.done();
    if (hw.dac_bits < 1 || hw.dac_bits > 8) throw config_error("hardware.dac_bits: must be in [1, 8]");
    if (hw.gain_sigma < 0 || hw.offset_sigma < 0)
        throw config_error("hardware: sigmas must be non-negative");
    return hw;
}

UpdateSchedule parse_schedule(const std::string& s, const std::string& where) {
    if (s == "sequential_fixed") return UpdateSchedule::SequentialFixed;
    if (s == "sequential_random_permutation") return UpdateSchedule::SequentialRandomPermutation;
    if (s == "chromatic") return UpdateSchedule::Chromatic;
    throw config_error(where + ": unknown schedule '" + s + "'");
}

const char* schedule_name(UpdateSchedule s) {
    switch (s) {
    case UpdateSchedule::SequentialFixed: return "sequential_fixed";
    case UpdateSchedule::SequentialRandomPermutation: return "sequential_random_permutation";
    case UpdateSchedule::Chromatic: return "chromatic";
    }
    return "?";
}

SamplerConfig parse_sampler(const json& j, std::uint64_t master_seed, std::vector<int>& designated) {
    Fields f(j, "sampler");
    SamplerConfig cfg;
    cfg.beta = as_num(f.req("beta"), f.where("beta"));
    cfg.sweeps = as_int(f.req("sweeps"), f.where("sweeps"));
    if (const json* v = f.opt("burn_in")) cfg.burn_in = as_int(*v, f.where("burn_in"));
    if (const json* v = f.opt("schedule"))
        cfg.schedule = parse_schedule(as_str(*v, f.where("schedule")), f.where("schedule"));
    if (const json* v = f.opt("designated_nodes"))
        designated = as_int_list(*v, f.where("designated_nodes"));
    cfg.seed = master_seed;
    f.done();
    return cfg;
}

AnnealSchedule parse_anneal_schedule(Fields& f) {
    AnnealSchedule s;
    s.beta_start = as_num(f.req("beta_start"), f.where("beta_start"));
    s.beta_end = as_num(f.req("beta_end"), f.where("beta_end"));
    s.sweeps = as_int(f.req("sweeps"), f.where("sweeps"));
    if (const json* v = f.opt("shape")) {
        const std::string name = as_str(*v, f.where("shape"));
        if (name == "linear")
            s.shape = ScheduleShape::Linear;
        else if (name == "geometric")
            s.shape = ScheduleShape::Geometric;
        else
            throw config_error(f.where("shape") + ": must be 'linear' or 'geometric'");
    }
    return s;
}

IsingModel parse_model_source(const json& j, std::shared_ptr<const ChimeraTopology> topo,
                              const std::filesystem::path& base_dir) {
    Fields f(j, "model");
    if (f.has("file")) {
        const std::filesystem::path p = as_str(f.req("file"), f.where("file"));
        f.done();
        IsingModel m = load_model(p.is_absolute() ? p : base_dir / p);
        const ChimeraTopology& mt = m.topology();
        auto sorted_cells = [](std::vector<CellCoord> cells) {
            std::sort(cells.begin(), cells.end(), [](const CellCoord& a, const CellCoord& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
            return cells;
        };
        const bool same = mt.rows() == topo->rows() && mt.cols() == topo->cols() &&
                          mt.shore_size() == topo->shore_size() &&
                          sorted_cells(mt.disabled_cells()) == sorted_cells(topo->disabled_cells());
        if (!same) throw config_error("model.file: model topology does not match the config topology");
        return m;
    }
    Fields g(f.req("generator"), "model.generator");
    f.done();
    const std::string type = as_str(g.req("type"), "model.generator.type");
    if (type == "zero") {
        g.done();
        return IsingModel(std::move(topo));
    }
    if (type == "sk") {
        CouplingDistribution dist = CouplingDistribution::PlusMinusOne;
        const std::string dname = as_str(g.req("distribution"), "model.generator.distribution");
        if (dname == "plus_minus_one")
            dist = CouplingDistribution::PlusMinusOne;
        else if (dname == "gaussian_quantized")
            dist = CouplingDistribution::GaussianQuantized;
        else
            throw config_error("model.generator.distribution: unknown '" + dname + "'");
        double sigma = 0.3;
        if (const json* v = g.opt("sigma")) sigma = as_num(*v, "model.generator.sigma");
        const std::uint64_t seed = as_uint(g.req("seed"), "model.generator.seed");
        g.done();
        return sk_instance(std::move(topo), dist, seed, sigma);
    }
    throw config_error("model.generator.type: unknown '" + type + "'");
}

Graph generate_subgraph(const ChimeraTopology& topo, double edge_prob, int max_weight,
                        std::uint64_t seed) {
    if (!(edge_prob > 0.0) || edge_prob > 1.0)
        throw config_error("maxcut.generator.edge_prob: must be in (0, 1]");
    if (max_weight < 1 || max_weight > kCodeMax)
        throw config_error("maxcut.generator.max_weight: must be in [1, 127]");
    Graph g;
    g.node_count = topo.node_count();
    SplitMix rng(derive_seed(seed, 0x47524150)); // "GRAP"
    for (const Edge& e : topo.edges())
        if (rng.next_unit() < edge_prob) {
            const double w = 1.0 + static_cast<double>(rng.next_below(max_weight));
            g.edges.push_back({e.a, e.b, w});
        }
    if (g.edges.empty()) throw config_error("maxcut.generator: no edges survived edge_prob");
    // pin the largest weight to max_weight so quantization is exact
    g.edges[rng.next_below(g.edges.size())].w = max_weight;
    return g;
}

struct OutputSet {
    std::map<std::string, std::string> files;

    void add(const std::string& name, std::string content) { files[name] = std::move(content); }
};

json histogram_json(const ChainStats& stats) {
    json counts = json::object();
    for (std::size_t p = 0; p < stats.histogram.size(); ++p)
        if (stats.histogram[p] > 0)
            counts[pattern_bitstring(p, stats.designated_nodes.size())] = stats.histogram[p];
    return {{"designated_nodes", stats.designated_nodes}, {"counts", counts}};
}

// --- per-kind runners -------------------------------------------------------

void run_sample(const json& cfg, Fields& f, std::uint64_t seed, const std::string& hash,
                const RunOptions& opt, OutputSet& out) {
    auto topo = parse_topology(f.req("topology"));
    const HardwareProfile hw = parse_hardware(f.req("hardware"));
    const IsingModel model = parse_model_source(f.req("model"), topo, opt.base_dir);
    std::vector<int> designated;
    const SamplerConfig sampler = parse_sampler(f.req("sampler"), seed, designated);
    (void)cfg;

    const ChainStats stats = run_chain(model, sampler, hw, designated, opt.threads);

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "# seed=" << sampler.seed << " schedule=" << schedule_name(sampler.schedule)
        << " beta=" << format_double(sampler.beta) << "\n";
    csv << "sweep,energy\n";
    for (std::size_t t = 0; t < stats.energy_trace.size(); ++t)
        csv << t << "," << format_double(stats.energy_trace[t]) << "\n";
    out.add("energy_trace.csv", csv.str());

    json js;
    js["config_hash"] = hash;
    js["seed"] = sampler.seed;
    js["schedule"] = schedule_name(sampler.schedule);
    js["beta"] = sampler.beta;
    js["sweeps"] = sampler.sweeps;
    js["burn_in"] = sampler.burn_in;
    js["mean_spin"] = stats.mean_spin;
    json pc = json::array();
    const auto& edges = model.topology().edges();
    for (std::size_t k = 0; k < stats.pair_correlation.size(); ++k)
        pc.push_back({{"node_a", edges[k].a}, {"node_b", edges[k].b}, {"value", stats.pair_correlation[k]}});
    js["pair_correlation"] = pc;
    js["histogram"] = histogram_json(stats);
    out.add("stats.json", js.dump(2) + "\n");
}

void write_anneal_outputs(const AnnealSchedule& schedule, UpdateSchedule update, int restarts,
                          std::uint64_t seed, const std::string& hash, const AnnealResult& result,
                          OutputSet& out) {
    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "# seed=" << seed << " update=" << schedule_name(update)
        << " beta_start=" << format_double(schedule.beta_start)
        << " beta_end=" << format_double(schedule.beta_end)
        << " shape=" << (schedule.shape == ScheduleShape::Linear ? "linear" : "geometric")
        << " restarts=" << restarts << "\n";
    csv << "restart,sweep,energy,min_energy\n";
    for (int r = 0; r < restarts; ++r)
        for (std::size_t t = 0; t < result.traces[r].energy.size(); ++t)
            csv << r << "," << t << "," << format_double(result.traces[r].energy[t]) << ","
                << format_double(result.traces[r].min_energy[t]) << "\n";
    out.add("trace.csv", csv.str());
}

json spins_json(const SpinState& s) {
    json arr = json::array();
    for (std::int8_t v : s.m) arr.push_back(static_cast<int>(v));
    return arr;
}

void run_anneal(const json& cfg, Fields& f, std::uint64_t seed, const std::string& hash,
                const RunOptions& opt, OutputSet& out) {
    auto topo = parse_topology(f.req("topology"));
    const HardwareProfile hw = parse_hardware(f.req("hardware"));
    const IsingModel model = parse_model_source(f.req("model"), topo, opt.base_dir);
    Fields a(f.req("anneal"), "anneal");
    const AnnealSchedule schedule = parse_anneal_schedule(a);
    const int restarts = static_cast<int>(as_int(a.req("restarts"), a.where("restarts")));
    UpdateSchedule update = UpdateSchedule::SequentialFixed;
    if (const json* v = a.opt("update"))
        update = parse_schedule(as_str(*v, a.where("update")), a.where("update"));
    a.done();
    (void)cfg;

    const AnnealResult result = anneal(model, schedule, hw, seed, restarts, update, opt.threads);
    write_anneal_outputs(schedule, update, restarts, seed, hash, result, out);

    json best;
    best["config_hash"] = hash;
    best["seed"] = seed;
    best["schedule"] = {{"beta_start", schedule.beta_start},
                        {"beta_end", schedule.beta_end},
                        {"sweeps", schedule.sweeps},
                        {"shape", schedule.shape == ScheduleShape::Linear ? "linear" : "geometric"}};
    best["best_energy"] = result.best_energy;
    best["best_restart"] = result.best_restart;
    best["spins"] = spins_json(result.best_state);
    if (model.node_count() <= 20) { // enumeration is cheap: report the ground truth
        const GroundResult ground = brute_force_ground(model);
        best["oracle"] = {{"ground_energy", ground.energy}, {"degeneracy", ground.degeneracy}};
    }
    out.add("best.json", best.dump(2) + "\n");

    std::cout << "anneal: best energy " << format_double(result.best_energy) << " (restart "
              << result.best_restart << ")\n";
}

GateKind parse_gate(const std::string& s, const std::string& where) {
    if (s == "and") return GateKind::And;
    if (s == "or") return GateKind::Or;
    if (s == "xor") return GateKind::Xor;
    if (s == "full_adder") return GateKind::FullAdder;
    throw config_error(where + ": unknown gate '" + s + "'");
}

void run_train(const json& cfg, Fields& f, std::uint64_t seed, const std::string& hash,
               const RunOptions& opt, OutputSet& out) {
    auto topo = parse_topology(f.req("topology"));
    const HardwareProfile hw = parse_hardware(f.req("hardware"));
    IsingModel initial = f.has("model") ? parse_model_source(f.req("model"), topo, opt.base_dir)
                                        : IsingModel(topo);
    Fields t(f.req("train"), "train");
    (void)cfg;

    TargetDistribution target;
    if (t.has("target_file")) {
        const std::filesystem::path p = as_str(t.req("target_file"), t.where("target_file"));
        std::ifstream in(p.is_absolute() ? p : opt.base_dir / p);
        if (!in) throw config_error("train.target_file: cannot open '" + p.string() + "'");
        json tj;
        try {
            in >> tj;
        } catch (const json::exception& e) {
            throw config_error("train.target_file: " + std::string(e.what()));
        }
        target = target_from_json(tj);
    } else {
        const GateKind kind = parse_gate(as_str(t.req("target"), t.where("target")), t.where("target"));
        if (const json* v = t.opt("designated_nodes"))
            target = gate_targets(kind, as_int_list(*v, t.where("designated_nodes")));
        else
            target = gate_targets(kind);
    }

    CdConfig cd;
    cd.seed = seed;
    if (const json* v = t.opt("learning_rate")) cd.learning_rate = as_num(*v, t.where("learning_rate"));
    if (const json* v = t.opt("cd_k")) cd.cd_k = static_cast<int>(as_int(*v, t.where("cd_k")));
    if (const json* v = t.opt("steps")) cd.steps = static_cast<int>(as_int(*v, t.where("steps")));
    if (const json* v = t.opt("batch")) cd.batch = static_cast<int>(as_int(*v, t.where("batch")));
    if (const json* v = t.opt("beta_train")) cd.beta_train = as_num(*v, t.where("beta_train"));
    if (const json* v = t.opt("persistent")) cd.persistent = as_bool(*v, t.where("persistent"));
    if (const json* v = t.opt("positive_burn_in"))
        cd.positive_burn_in = static_cast<int>(as_int(*v, t.where("positive_burn_in")));
    if (const json* v = t.opt("positive_samples"))
        cd.positive_samples = static_cast<int>(as_int(*v, t.where("positive_samples")));
    if (const json* v = t.opt("eval_sweeps")) cd.eval_sweeps = as_int(*v, t.where("eval_sweeps"));
    if (const json* v = t.opt("eval_burn_in")) cd.eval_burn_in = as_int(*v, t.where("eval_burn_in"));
    t.done();

    const TrainResult result = train(initial, target, cd, hw, opt.threads);

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "# seed=" << seed << " beta=" << format_double(cd.beta_train)
        << " learning_rate=" << format_double(cd.learning_rate) << " cd_k=" << cd.cd_k
        << " batch=" << cd.batch << "\n";
    csv << "step,kl,mean_abs_correlation_error\n";
    for (const auto& row : result.trace)
        csv << row.step << "," << format_double(row.kl) << ","
            << format_double(row.mean_abs_corr_error) << "\n";
    out.add("trace.csv", csv.str());

    json mj = model_to_json(result.model);
    mj["config_hash"] = hash;
    out.add("model.json", mj.dump(2) + "\n");

    json tj = target_to_json(target);
    tj["config_hash"] = hash;
    out.add("target.json", tj.dump(2) + "\n");

    if (!result.trace.empty())
        std::cout << "train: final kl " << format_double(result.trace.back().kl) << "\n";
}

void run_maxcut(const json& cfg, Fields& f, std::uint64_t seed, const std::string& hash,
                const RunOptions& opt, OutputSet& out) {
    auto topo = parse_topology(f.req("topology"));
    const HardwareProfile hw = parse_hardware(f.req("hardware"));
    Fields m(f.req("maxcut"), "maxcut");
    Graph graph;
    if (m.has("graph_file")) {
        const std::filesystem::path p = as_str(m.req("graph_file"), m.where("graph_file"));
        graph = load_graph(p.is_absolute() ? p : opt.base_dir / p);
    } else {
        Fields g(m.req("generator"), "maxcut.generator");
        const std::string type = as_str(g.req("type"), "maxcut.generator.type");
        if (type != "random_subgraph")
            throw config_error("maxcut.generator.type: unknown '" + type + "'");
        double edge_prob = 0.7;
        int max_weight = 127;
        if (const json* v = g.opt("edge_prob")) edge_prob = as_num(*v, "maxcut.generator.edge_prob");
        if (const json* v = g.opt("max_weight"))
            max_weight = static_cast<int>(as_int(*v, "maxcut.generator.max_weight"));
        const std::uint64_t gseed = as_uint(g.req("seed"), "maxcut.generator.seed");
        g.done();
        graph = generate_subgraph(*topo, edge_prob, max_weight, gseed);
    }
    m.done();

    Fields a(f.req("anneal"), "anneal");
    const AnnealSchedule schedule = parse_anneal_schedule(a);
    const int restarts = static_cast<int>(as_int(a.req("restarts"), a.where("restarts")));
    UpdateSchedule update = UpdateSchedule::SequentialFixed;
    if (const json* v = a.opt("update"))
        update = parse_schedule(as_str(*v, a.where("update")), a.where("update"));
    a.done();
    (void)cfg;

    const IsingModel model = maxcut_encode(graph, topo);
    const AnnealResult result = anneal(model, schedule, hw, seed, restarts, update, opt.threads);
    write_anneal_outputs(schedule, update, restarts, seed, hash, result, out);

    const double best_cut = cut_value(graph, result.best_state);
    // exact identity in code units: coupling energy = total weight - 2 cut
    const std::int64_t e_cu = coupling_energy_code_units(model, result.best_state);
    const std::int64_t identity_residual =
        e_cu - (total_weight_code_units(model) - 2 * cut_value_code_units(model, result.best_state));

    json rj;
    rj["config_hash"] = hash;
    rj["seed"] = seed;
    rj["graph"] = {{"nodes", graph.node_count}, {"edge_count", graph.edges.size()}};
    rj["best_cut"] = best_cut;
    rj["best_energy"] = result.best_energy;
    rj["best_restart"] = result.best_restart;
    rj["identity_residual_code_units"] = identity_residual;
    rj["spins"] = spins_json(result.best_state);
    if (graph.node_count <= 20) rj["oracle"] = {{"max_cut", brute_force_maxcut(graph).cut}};
    out.add("result.json", rj.dump(2) + "\n");

    std::cout << "maxcut: best cut " << format_double(best_cut) << " (restart "
              << result.best_restart << ")\n";
}

void run_characterize(const json& cfg, Fields& f, std::uint64_t seed, const std::string& hash,
                      const RunOptions& opt, OutputSet& out) {
    auto topo = parse_topology(f.req("topology"));
    const HardwareProfile hw = parse_hardware(f.req("hardware"));
    Fields c(f.req("characterize"), "characterize");
    (void)cfg;

    std::vector<int> nodes;
    const json& jn = c.req("nodes");
    if (jn.is_string()) {
        if (jn.get<std::string>() != "all")
            throw config_error("characterize.nodes: must be 'all' or a node list");
        nodes.resize(topo->node_count());
        for (int i = 0; i < topo->node_count(); ++i) nodes[i] = i;
    } else {
        nodes = as_int_list(jn, c.where("nodes"));
    }

    std::vector<WeightCode> codes;
    if (const json* v = c.opt("codes")) {
        for (int code : as_int_list(*v, c.where("codes"))) {
            if (code < -kCodeMax || code > kCodeMax)
                throw config_error("characterize.codes: code outside [-127, 127]");
            codes.push_back(static_cast<WeightCode>(code));
        }
    } else {
        for (int i = 0; i < 21; ++i) // 21 evenly spaced codes across full scale
            codes.push_back(static_cast<WeightCode>(std::lround(-127.0 + i * 254.0 / 20.0)));
    }
    double beta = 1.0;
    if (const json* v = c.opt("beta")) beta = as_num(*v, c.where("beta"));
    std::int64_t sweeps_per_code = 20000;
    if (const json* v = c.opt("sweeps_per_code")) sweeps_per_code = as_int(*v, c.where("sweeps_per_code"));
    c.done();

    const IsingModel tmpl = [&] {
        IsingModel m(topo);
        for (int k = 0; k < m.edge_count(); ++k) m.set_edge_enabled(k, false);
        return m;
    }();

    std::vector<NodeCharacterization> results(nodes.size());
    parallel_for(static_cast<std::int64_t>(nodes.size()), opt.threads, [&](std::int64_t i) {
        results[i] = bias_sweep_characterize(tmpl, nodes[i], codes, beta, sweeps_per_code, hw,
                                             derive_seed(seed, nodes[i]));
    });

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n";
    csv << "# seed=" << seed << " beta=" << format_double(beta)
        << " rng=" << (hw.rng_source == RngSource::Ideal ? "ideal" : "lfsr")
        << " sweeps_per_code=" << sweeps_per_code << "\n";
    csv << "node,bias_code,mean_spin\n";
    for (const auto& r : results)
        for (const auto& p : r.points)
            csv << r.node << "," << static_cast<int>(p.code) << "," << format_double(p.mean_spin)
                << "\n";
    out.add("sweep.csv", csv.str());

    json fits;
    fits["config_hash"] = hash;
    fits["beta"] = beta;
    json rows = json::array();
    double ratio_sum = 0.0, ratio_sq = 0.0;
    int ok_count = 0;
    for (const auto& r : results) {
        rows.push_back({{"node", r.node},
                        {"beta_eff", r.fit.beta_eff},
                        {"offset", r.fit.offset},
                        {"fit_ok", r.fit.ok}});
        if (r.fit.ok) {
            const double ratio = r.fit.beta_eff / beta;
            ratio_sum += ratio;
            ratio_sq += ratio * ratio;
            ++ok_count;
        }
    }
    fits["nodes"] = rows;
    json summary;
    summary["fitted"] = ok_count;
    if (ok_count > 1) {
        const double mean = ratio_sum / ok_count;
        summary["beta_ratio_mean"] = mean;
        summary["beta_ratio_std"] =
            std::sqrt(std::max(0.0, (ratio_sq - ok_count * mean * mean) / (ok_count - 1)));
    }
    fits["summary"] = summary;
    out.add("fits.json", fits.dump(2) + "\n");
}

} // namespace

std::vector<std::filesystem::path> run_experiment_json(const std::string& kind, const json& config,
                                                       const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();

    Fields f(config, "config");
    const std::string cfg_kind = as_str(f.req("kind"), "config.kind");
    if (cfg_kind != kind)
        throw config_error("config.kind: '" + cfg_kind + "' does not match the requested '" + kind + "'");
    std::uint64_t seed = as_uint(f.req("seed"), "config.seed");
    if (options.seed_override) seed = *options.seed_override;

    std::string out_dir = options.out_dir;
    if (f.has("output")) {
        Fields o(f.req("output"), "output");
        const std::string dir = as_str(o.req("dir"), "output.dir");
        o.done();
        if (out_dir.empty()) out_dir = dir;
    }
    if (out_dir.empty())
        if (const char* env = std::getenv("PBITSIM_OUT")) out_dir = env;
    if (out_dir.empty()) out_dir = "pbitsim_out";

    // hash covers the effective config (seed override applied)
    json effective = config;
    effective["seed"] = seed;
    const std::string hash = fnv1a_hex(effective.dump());

    OutputSet out;
    if (kind == "sample")
        run_sample(config, f, seed, hash, options, out);
    else if (kind == "anneal")
        run_anneal(config, f, seed, hash, options, out);
    else if (kind == "train")
        run_train(config, f, seed, hash, options, out);
    else if (kind == "maxcut")
        run_maxcut(config, f, seed, hash, options, out);
    else if (kind == "characterize")
        run_characterize(config, f, seed, hash, options, out);
    else
        throw config_error("unknown experiment kind '" + kind + "'");
    f.done();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["config_hash"] = hash;
    manifest["kind"] = kind;
    manifest["tool"] = "pbitsim";
    manifest["version"] = kToolVersion;
    manifest["seed"] = seed;
    manifest["threads"] = options.threads;
    manifest["config"] = effective;
    json names = json::array();
    for (const auto& [name, body] : out.files) names.push_back(name);
    manifest["outputs"] = names;
    manifest["wall_time_s"] = wall;
    out.add("manifest.json", manifest.dump(2) + "\n");

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, body] : out.files) {
        const std::filesystem::path p = dir / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
        os << body;
        written.push_back(p);
    }
    return written;
}

int run_experiment_file(const std::string& kind, const std::filesystem::path& config_path,
                        RunOptions options) {
    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw config_error("cannot open config '" + config_path.string() + "'");
        json config;
        try {
            config = json::parse(in);
        } catch (const json::exception& e) {
            throw config_error(config_path.string() + ": " + e.what());
        }
        if (options.base_dir.empty()) options.base_dir = config_path.parent_path();
        run_experiment_json(kind, config, options);
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace pbit
