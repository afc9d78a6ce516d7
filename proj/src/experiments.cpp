// SPDX-License-Identifier: Apache-2.0

#include "qalign/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qalign/rng.hpp"

namespace qalign {

DbSizeRule parse_db_size_rule(const std::string& name) {
    if (name == "floor") {
        return DbSizeRule::floor;
    }
    if (name == "ceil") {
        return DbSizeRule::ceil;
    }
    throw std::invalid_argument("unknown database size rule '" + name + "'");
}

std::string rule_name(DbSizeRule rule) {
    return rule == DbSizeRule::floor ? "floor" : "ceil";
}

std::size_t database_size(unsigned n, DbSizeRule rule) {
    if (n == 0 || n > 20) {
        throw std::invalid_argument("n must be in [1, 20]");
    }
    const std::size_t span = std::size_t{1} << n;
    return rule == DbSizeRule::floor ? span / n : (span + n - 1) / n;
}

Database random_database(unsigned n, DbSizeRule rule, std::uint64_t seed) {
    if (n < 3 || n > 8) {
        throw std::invalid_argument("random databases are generated for 3 <= n <= 8");
    }
    const std::size_t size = database_size(n, rule);
    std::vector<std::uint64_t> values(std::size_t{1} << n);
    std::iota(values.begin(), values.end(), 0);
    // Partial Fisher-Yates: the first `size` slots end up a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < size; ++i) {
        const auto j = i + rng.below(values.size() - i);
        std::swap(values[i], values[j]);
    }
    values.resize(size);
    return Database(n, std::move(values));
}

TargetSequence random_target(unsigned n, std::uint64_t seed) {
    if (n < 3 || n > 8) {
        throw std::invalid_argument("random targets are generated for 3 <= n <= 8");
    }
    Rng rng(seed);
    return {n, rng.below(std::uint64_t{1} << n)};
}

// ---------------------------------------------------------------------------
// Layer study

LayerStudy layer_study(unsigned n, unsigned p_max, std::uint64_t seed, std::uint64_t shots,
                       DbSizeRule rule) {
    if (p_max == 0) {
        throw std::invalid_argument("p_max must be at least 1");
    }
    Database db = random_database(n, rule, derive_seed(seed, {1}));
    Rng rng(derive_seed(seed, {2}));
    const TargetSequence target{n, db.entries()[rng.below(db.size())]};
    const RegisterLayout layout(n);
    const Circuit u = initialisation_unitary(exact_loader(db), target, layout);
    const OracleSpec oracle{0, layout};
    const Circuit layer = grover_layer(u, oracle);
    const std::uint64_t solution = layout.compose(target.bits, 0, 0);

    LayerStudy study{std::move(db), target, {}};
    Statevector state = run(u);
    for (unsigned p = 0; p <= p_max; ++p) {
        if (p > 0) {
            apply_circuit(state, layer);
        }
        const Counts counts = sample_counts(state, shots, derive_seed(seed, {3, p}));
        double norm2 = 0.0;
        for (const auto& [outcome, count] : counts) {
            norm2 += static_cast<double>(count) * static_cast<double>(count);
        }
        const auto hit = counts.find(solution);
        const double on_target = hit == counts.end() ? 0.0 : static_cast<double>(hit->second);
        study.points.push_back({p, marked_probability(state, layout, 0),
                                success_probability(p, study.db.size(), 1), on_target / std::sqrt(norm2)});
    }
    return study;
}

// ---------------------------------------------------------------------------
// Fidelity sweep

std::vector<double> SweepConfig::default_fidelities() {
    std::vector<double> f;
    for (int i = 1; i <= 20; ++i) {
        f.push_back(i / 20.0);
    }
    return f;
}

void SweepConfig::validate() const {
    if (qubit_sizes.empty() || fidelities.empty()) {
        throw std::invalid_argument("sweep needs at least one qubit size and one fidelity");
    }
    for (unsigned n : qubit_sizes) {
        if (n < 3 || n > 8) {
            throw std::invalid_argument("sweep qubit sizes must lie in [3, 8]");
        }
    }
    for (double f : fidelities) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw std::invalid_argument("sweep fidelities must lie in (0, 1]");
        }
    }
    if (trials == 0 || shots == 0 || repeats == 0 || jobs == 0) {
        throw std::invalid_argument("trials, shots, repeats and jobs must be positive");
    }
    ga.validate();
}

std::uint64_t trial_seed(std::uint64_t master, unsigned n, std::size_t fidelity_index, unsigned trial) {
    return derive_seed(master, {n, fidelity_index, trial});
}

SweepRecord run_trial(const SweepConfig& config, unsigned n, std::size_t fidelity_index, unsigned trial) {
    SweepRecord record;
    record.n = n;
    record.trial = trial;
    record.target_fidelity = config.fidelities.at(fidelity_index);
    record.seed = trial_seed(config.seed, n, fidelity_index, trial);
    try {
        const Database db = random_database(n, config.rule, derive_seed(record.seed, {1}));
        const TargetSequence target = random_target(n, derive_seed(record.seed, {2}));
        record.database_size = db.size();
        const Statevector ideal = database_state(db);

        Circuit loader(n);
        if (config.mode == LoaderMode::fast) {
            const PerturbedState perturbed =
                perturb_state(ideal, record.target_fidelity, derive_seed(record.seed, {3}));
            loader = state_preparation(perturbed.state);
            record.epsilon = perturbed.spec.epsilon;
            record.hermitian_seed = perturbed.spec.hermitian_seed;
            record.achieved_fidelity = fidelity(ideal, run(loader));
        } else {
            GaConfig ga = config.ga;
            ga.seed = derive_seed(record.seed, {3});
            CalibratedLoader calibrated = fidelity_calibrated_loader(db, record.target_fidelity, ga);
            loader = std::move(calibrated.circuit);
            record.epsilon = calibrated.perturbation.epsilon;
            record.hermitian_seed = calibrated.perturbation.hermitian_seed;
            record.achieved_fidelity = calibrated.fidelity_to_database;
        }

        QsaConfig qsa;
        qsa.shots = config.shots;
        qsa.repeats = config.repeats;
        qsa.layer_policy = config.layer_policy;
        qsa.seed = derive_seed(record.seed, {4});
        const QsaResult result = run_qsa(loader, db, target, qsa);

        record.accuracy = result.accuracy;
        record.distance_found = result.distance;
        record.d_min_classical = result.d_min_classical;
        record.layers = result.layers_used;
        record.degraded = result.degraded;
        const auto c = count_matches(db, target, result.delta_trace.back());
        if (c > 0) {
            record.layers_paper = optimal_layers(db.size(), c);
            record.layers_best = best_integer_layers(db.size(), c);
        }
    } catch (const std::exception& e) {
        record.error = e.what();
    }
    return record;
}

SweepOutput fidelity_sweep(const SweepConfig& config, std::ostream* log) {
    config.validate();
    struct Item {
        unsigned n;
        std::size_t fidelity_index;
        unsigned trial;
    };
    std::vector<Item> items;
    for (unsigned n : config.qubit_sizes) {
        for (std::size_t f = 0; f < config.fidelities.size(); ++f) {
            for (unsigned t = 0; t < config.trials; ++t) {
                items.push_back({n, f, t});
            }
        }
    }

    std::vector<SweepRecord> records(items.size());
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            const Item& item = items[i];
            records[i] = run_trial(config, item.n, item.fidelity_index, item.trial);
            const std::lock_guard lock(log_mutex);
            ++done;
            if (log && (done % 50 == 0 || done == items.size())) {
                *log << "sweep: " << done << '/' << items.size() << " trials\n";
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(config.jobs, items.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    SweepOutput out{std::move(records), {}};
    out.summary = summarize(out.records);
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<SweepRecord>& records) {
    // Rows are sorted by n, then ascending fidelity.
    std::map<std::pair<unsigned, double>, std::vector<const SweepRecord*>> groups;
    for (const auto& r : records) {
        if (!r.error) {
            groups[{r.n, r.target_fidelity}].push_back(&r);
        }
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, members] : groups) {
        double sum = 0.0;
        for (const auto* r : members) {
            sum += r->accuracy;
        }
        const double mean = sum / static_cast<double>(members.size());
        double ss = 0.0;
        for (const auto* r : members) {
            ss += (r->accuracy - mean) * (r->accuracy - mean);
        }
        const double sd = members.size() > 1 ? std::sqrt(ss / static_cast<double>(members.size() - 1)) : 0.0;
        rows.push_back({key.first, members.front()->database_size, key.second, mean, sd, members.size()});
    }
    return rows;
}

nlohmann::json to_json(const SweepRecord& r) {
    nlohmann::json j{
        {"n", r.n},
        {"N", r.database_size},
        {"target_fidelity", r.target_fidelity},
        {"achieved_fidelity", r.achieved_fidelity},
        {"trial", r.trial},
        {"accuracy", r.accuracy},
        {"distance_found", r.distance_found},
        {"d_min_classical", r.d_min_classical},
        {"layers", r.layers},
        {"layers_paper", r.layers_paper},
        {"layers_best", r.layers_best},
        {"degraded", r.degraded},
        {"seed", r.seed},
        {"epsilon", r.epsilon},
        {"hermitian_seed", r.hermitian_seed},
    };
    if (r.error) {
        j["error"] = *r.error;
    }
    return j;
}

void write_records(std::ostream& out, const std::vector<SweepRecord>& records) {
    for (const auto& r : records) {
        out << to_json(r).dump() << '\n';
    }
}

namespace {

std::string fixed(double value, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << value;
    return s.str();
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
    out << "n,N,fidelity,mean_accuracy,std_accuracy,trials\n";
    for (const auto& row : summary) {
        out << row.n << ',' << row.database_size << ',' << fixed(row.fidelity, 2) << ','
            << fixed(row.mean_accuracy, 6) << ',' << fixed(row.std_accuracy, 6) << ',' << row.trials
            << '\n';
    }
}

void write_plot_files(const std::filesystem::path& dir, const std::vector<SummaryRow>& summary) {
    std::map<unsigned, std::vector<const SummaryRow*>> by_n;
    for (const auto& row : summary) {
        by_n[row.n].push_back(&row);
    }
    for (const auto& [n, rows] : by_n) {
        const auto path = dir / ("plot_n" + std::to_string(n) + ".dat");
        std::ofstream out(path);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        out << "# fidelity mean_accuracy std_accuracy (n=" << n << ")\n";
        for (const auto* row : rows) {
            out << fixed(row->fidelity, 2) << ' ' << fixed(row->mean_accuracy, 6) << ' '
                << fixed(row->std_accuracy, 6) << '\n';
        }
    }
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman needs two equal-length samples of size >= 2");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace qalign
