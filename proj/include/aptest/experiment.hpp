#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "aptest/cluster_tester.hpp"
#include "aptest/disjoint_union.hpp"
#include "aptest/errors.hpp"
#include "aptest/generators.hpp"
#include "aptest/interval_tester.hpp"
#include "aptest/io.hpp"
#include "aptest/ltf_tester.hpp"
#include "aptest/margin.hpp"
#include "aptest/oracle.hpp"
#include "aptest/stats.hpp"

namespace aptest {

struct ExperimentConfig {
    std::string tester;  // intervals-uniform | intervals-pairs | intervals-general |
                         // ltf | cluster | disjoint | margin
    json generator;      // family-specific instance spec
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    json constants;      // optional tester-constant overrides

    static ExperimentConfig from_json(const json& j) {
        ExperimentConfig c;
        c.tester = j.at("tester").get<std::string>();
        c.generator = j.at("generator");
        c.trials = j.at("trials").get<std::uint64_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("constants")) c.constants = j.at("constants");
        return c;
    }
};

struct TrialRecord {
    std::uint64_t index = 0;
    Decision decision = Decision::Accept;
    std::optional<double> statistic;
    std::optional<double> threshold;
    std::uint64_t labels_used = 0;
    std::uint64_t unlabeled_used = 0;
    double wall_ms = 0.0;
    bool in_property = false;
    std::optional<double> distance;  // machine-checked certificate when available
};

namespace detail {

inline IntervalKind interval_kind_from(const std::string& s) {
    if (s == "member") return IntervalKind::Member;
    if (s == "far_fine") return IntervalKind::FarFine;
    if (s == "far_noisy") return IntervalKind::FarNoisy;
    throw BadParams("unknown interval kind " + s);
}

inline IntervalTesterConfig interval_config_from(const json& constants) {
    IntervalTesterConfig cfg;
    if (constants.is_object()) {
        if (constants.contains("c_r")) cfg.c_r = constants["c_r"].get<double>();
        if (constants.contains("c_gamma")) cfg.c_gamma = constants["c_gamma"].get<double>();
        if (constants.contains("rejection_cap"))
            cfg.rejection_cap_factor = constants["rejection_cap"].get<double>();
    }
    return cfg;
}

// rank-space function g pulled back through the CDF of a piecewise density
inline PiecewiseConstantFn pullback_through_cdf(const PiecewiseConstantFn& g,
                                                const UnitPiecewiseDensity& dist) {
    for (double w : dist.weights)
        if (!(w > 0.0)) throw BadParams("pullback: density must be positive");
    auto inverse_cdf = [&](double p) {
        const auto it = std::lower_bound(dist.cumulative.begin(), dist.cumulative.end(), p);
        const auto i = std::min<std::size_t>(
            static_cast<std::size_t>(it - dist.cumulative.begin()), dist.weights.size() - 1);
        const double below = i == 0 ? 0.0 : dist.cumulative[i - 1];
        const double lo = dist.block_lo(i), hi = dist.block_hi(i);
        return lo + (p - below) * (hi - lo) / dist.weights[i];
    };
    std::vector<double> breaks;
    for (double b : g.breakpoints()) breaks.push_back(inverse_cdf(b));
    return PiecewiseConstantFn(std::move(breaks), g.block_values());
}

inline TrialRecord run_single_trial(const ExperimentConfig& config, std::uint64_t index) {
    TrialRecord rec;
    rec.index = index;
    const std::uint64_t oracle_seed = trial_seed(config.seed, index);
    const std::uint64_t instance_seed = mix64(oracle_seed);
    const auto& gen = config.generator;
    const auto t0 = std::chrono::steady_clock::now();

    TesterVerdict verdict;
    if (config.tester == "intervals-uniform" || config.tester == "intervals-pairs" ||
        config.tester == "intervals-general") {
        const auto d = gen.at("d").get<std::size_t>();
        const double eps = gen.at("eps").get<double>();
        const IntervalKind kind = interval_kind_from(gen.at("kind").get<std::string>());
        IntervalInstance inst = gen_interval_instance(d, eps, kind, instance_seed);
        rec.in_property = inst.in_property;
        rec.distance = inst.certified_distance;
        const IntervalTesterConfig cfg = interval_config_from(config.constants);
        if (config.tester == "intervals-general" && gen.contains("dist")) {
            const Distribution dist = distribution_from_json(gen.at("dist"));
            const auto& density = std::get<UnitPiecewiseDensity>(dist);
            ActiveOracle oracle(density,
                                IntervalUnionTarget{pullback_through_cdf(inst.fn, density)},
                                oracle_seed);
            verdict = test_union_intervals_general(oracle, d, eps, cfg);
        } else {
            ActiveOracle oracle(Uniform01{}, IntervalUnionTarget{inst.fn}, oracle_seed);
            if (config.tester == "intervals-uniform")
                verdict = test_union_intervals_uniform(oracle, d, eps, cfg);
            else if (config.tester == "intervals-pairs")
                verdict = test_union_intervals_pairs(oracle, d, eps, cfg);
            else
                verdict = test_union_intervals_general(oracle, d, eps, cfg);
        }
    } else if (config.tester == "ltf") {
        const auto n = gen.at("n").get<std::size_t>();
        const double eps = gen.at("eps").get<double>();
        const std::string kind = gen.at("kind").get<std::string>();
        LtfTesterConfig cfg;
        if (config.constants.is_object()) {
            if (config.constants.contains("c_m1")) cfg.c_m1 = config.constants["c_m1"].get<double>();
            if (config.constants.contains("c_m2")) cfg.c_m2 = config.constants["c_m2"].get<double>();
            if (config.constants.contains("pair_cap"))
                cfg.pair_cap = config.constants["pair_cap"].get<std::uint64_t>();
        }
        TargetFunction target = MemoizedRandom{};
        rec.in_property = false;
        if (kind == "ltf") {
            Rng gen_rng(instance_seed);
            std::vector<double> w(n);
            for (auto& wi : w) wi = gen_rng.gaussian();
            const double theta = gen.value("theta", 0.0);
            target = LtfTarget{LinearThreshold(std::move(w), theta)};
            rec.in_property = true;
            rec.distance = 0.0;
        } else if (kind != "random") {
            throw BadParams("ltf generator kind must be ltf|random");
        }
        ActiveOracle oracle(GaussianIsotropic{n}, std::move(target), oracle_seed);
        verdict = test_ltf(oracle, n, eps, cfg);
    } else if (config.tester == "cluster") {
        const auto bins = gen.at("bins").get<std::size_t>();
        const double eps = gen.at("eps").get<double>();
        const double impure = gen.value("impure_mass", 0.0);
        ClusterInstance inst = make_cluster_instance(bins, impure, instance_seed);
        rec.in_property = inst.error == 0.0;
        rec.distance = inst.error;
        ClusterTesterConfig cfg;
        if (config.constants.is_object() && config.constants.contains("c_n"))
            cfg.c_n = config.constants["c_n"].get<double>();
        ActiveOracle oracle(inst.mixture, inst.table, oracle_seed);
        verdict = test_cluster(oracle, bins, eps, cfg);
    } else if (config.tester == "disjoint") {
        const auto bins = gen.at("bins").get<std::size_t>();
        const double eps = gen.at("eps").get<double>();
        const double impure = gen.value("impure_mass", 0.0);
        ClusterInstance inst = make_cluster_instance(bins, impure, instance_seed);
        rec.in_property = inst.error == 0.0;
        rec.distance = inst.error;
        ActiveOracle oracle(inst.mixture, inst.table, oracle_seed);
        const std::vector<SubTester> testers(bins, constant_subtester());
        verdict = test_disjoint_union(oracle, testers, bins, eps);
    } else if (config.tester == "margin") {
        const auto d = gen.at("d").get<std::size_t>();
        const double gamma = gen.at("gamma").get<double>();
        const double c = gen.at("c").get<double>();
        const double eps = gen.at("eps").get<double>();
        const MarginKind kind =
            gen.at("kind").get<std::string>() == "margin" ? MarginKind::Margin : MarginKind::Far;
        MarginInstance inst = gen_margin_instance(d, gamma, c, eps, kind, instance_seed);
        rec.in_property = inst.in_property;
        rec.distance = inst.certificate;
        MarginTesterConfig cfg;
        if (config.constants.is_object()) {
            if (config.constants.contains("c_l")) cfg.c_l = config.constants["c_l"].get<double>();
            if (config.constants.contains("sample_scale"))
                cfg.sample_scale = config.constants["sample_scale"].get<double>();
        }
        ActiveOracle oracle(inst.atoms, inst.labels, oracle_seed);
        verdict = test_margin(oracle, gamma, c, eps, d, cfg);
    } else {
        throw BadParams("unknown tester " + config.tester);
    }

    const auto t1 = std::chrono::steady_clock::now();
    rec.decision = verdict.decision;
    rec.statistic = verdict.statistic;
    rec.threshold = verdict.threshold;
    rec.labels_used = verdict.labels_used;
    rec.unlabeled_used = verdict.unlabeled_used;
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return rec;
}

inline std::size_t worker_count(std::uint64_t trials) {
    std::size_t n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("APTEST_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<std::size_t>(v);
    }
    if (n < 1) n = 1;
    return std::min<std::size_t>(n, trials);
}

}  // namespace detail

// Runs trials on a bounded worker pool. Each trial builds its own oracle
// with seed = master_seed ^ trial_index, so output is identical across
// worker counts; records land in trial-index order.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& config,
                                               std::size_t workers_override = 0) {
    if (config.trials < 1) throw BadParams("run_experiment: trials must be >= 1");
    std::vector<TrialRecord> records(config.trials);
    const std::size_t workers =
        workers_override > 0 ? workers_override : detail::worker_count(config.trials);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto body = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= config.trials) return;
            try {
                records[i] = detail::run_single_trial(config, i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true))
                    first_error = "trial " + std::to_string(i) + ": " + e.what();
                return;
            }
        }
    };

    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error(first_error);
    return records;
}

// JSONL with deterministic fields only; wall-clock timing stays out so
// reruns with the same seed are byte-identical.
inline std::string to_jsonl(const std::vector<TrialRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        json line{{"trial", r.index},
                  {"decision", to_string(r.decision)},
                  {"statistic", r.statistic ? json(*r.statistic) : json(nullptr)},
                  {"threshold", r.threshold ? json(*r.threshold) : json(nullptr)},
                  {"labels_used", r.labels_used},
                  {"unlabeled_used", r.unlabeled_used},
                  {"truth",
                   json{{"in_property", r.in_property},
                        {"distance", r.distance ? json(*r.distance) : json(nullptr)}}}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

struct Summary {
    std::uint64_t trials = 0;
    std::uint64_t accepts = 0;
    double accept_rate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    double mean_labels = 0.0;
    double mean_unlabeled = 0.0;
    double p50_unlabeled = 0.0;
    double p90_unlabeled = 0.0;
    double mean_wall_ms = 0.0;

    static std::string csv_header() {
        return "trials,accepts,accept_rate,wilson_lo,wilson_hi,mean_labels,mean_unlabeled,"
               "p50_unlabeled,p90_unlabeled,mean_wall_ms";
    }

    std::string csv_row() const {
        std::ostringstream os;
        os.precision(10);
        os << trials << ',' << accepts << ',' << accept_rate << ',' << wilson_lo << ','
           << wilson_hi << ',' << mean_labels << ',' << mean_unlabeled << ',' << p50_unlabeled
           << ',' << p90_unlabeled << ',' << mean_wall_ms;
        return os.str();
    }
};

inline Summary summarize(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw EmptyInput("summarize: no records");
    Summary s;
    s.trials = records.size();
    std::vector<double> labels, unlabeled, wall;
    for (const auto& r : records) {
        if (r.decision == Decision::Accept) ++s.accepts;
        labels.push_back(static_cast<double>(r.labels_used));
        unlabeled.push_back(static_cast<double>(r.unlabeled_used));
        wall.push_back(r.wall_ms);
    }
    s.accept_rate = static_cast<double>(s.accepts) / static_cast<double>(s.trials);
    const WilsonInterval wi = wilson_interval(s.accepts, s.trials);
    s.wilson_lo = wi.lo;
    s.wilson_hi = wi.hi;
    s.mean_labels = mean_of(labels);
    s.mean_unlabeled = mean_of(unlabeled);
    s.p50_unlabeled = percentile(unlabeled, 0.5);
    s.p90_unlabeled = percentile(unlabeled, 0.9);
    s.mean_wall_ms = mean_of(wall);
    return s;
}

}  // namespace aptest
