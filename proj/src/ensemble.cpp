#include "eam/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <numeric>
#include <optional>
#include <sstream>

#include "eam/antminer.hpp"

namespace eam {

namespace {

constexpr std::uint64_t kBootstrapStream = 0xB0;
constexpr std::uint64_t kLearnerStream = 0x1E;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void EnsembleParams::validate() const {
    if (replicas == 0) {
        throw std::invalid_argument("ensemble needs at least one replica");
    }
    if (workers == 0) {
        throw std::invalid_argument("ensemble workers must be positive");
    }
}

std::size_t majority_vote(std::span<const std::size_t> votes, std::span<const double> training_priors) {
    if (votes.empty()) {
        throw std::invalid_argument("majority_vote: no votes");
    }
    std::vector<std::size_t> counts(training_priors.size(), 0);
    for (std::size_t v : votes) {
        if (v >= counts.size()) {
            throw std::invalid_argument("majority_vote: vote outside the class domain");
        }
        ++counts[v];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best] || (counts[c] == counts[best] && training_priors[c] > training_priors[best])) {
            best = c;
        }
    }
    return best;
}

Seed replica_bootstrap_seed(Seed master, std::size_t replica) {
    return derive_seed(master, {kBootstrapStream, replica});
}

Seed replica_learner_seed(Seed master, std::size_t replica) { return derive_seed(master, {kLearnerStream, replica}); }

EnsembleModel::EnsembleModel(SchemaPtr schema, std::vector<ClassifierPtr> members, std::vector<double> training_priors,
                             Seed master_seed)
    : schema_(std::move(schema)), members_(std::move(members)), priors_(std::move(training_priors)),
      master_seed_(master_seed) {
    if (!schema_) {
        throw std::invalid_argument("ensemble requires a schema");
    }
    if (members_.empty()) {
        throw std::invalid_argument("ensemble needs at least one member");
    }
    if (std::any_of(members_.begin(), members_.end(), [](const auto& m) { return !m; })) {
        throw std::invalid_argument("ensemble member is null");
    }
    if (priors_.size() != schema_->class_count()) {
        throw std::invalid_argument("training priors do not match the class domain");
    }
}

PredictionVector EnsembleModel::votes(const InstanceRow& instance) const {
    check_row(*schema_, instance);
    PredictionVector out;
    out.reserve(members_.size());
    for (const auto& m : members_) {
        out.push_back(m->predict(instance));
    }
    return out;
}

std::size_t EnsembleModel::predict(const InstanceRow& instance) const {
    return majority_vote(votes(instance), priors_);
}

std::size_t EnsembleModel::term_count() const {
    std::size_t n = 0;
    for (const auto& m : members_) {
        n += m->term_count();
    }
    return n;
}

double EnsembleModel::mean_member_terms() const {
    return static_cast<double>(term_count()) / static_cast<double>(members_.size());
}

ReplicaFailure::ReplicaFailure(std::size_t replica, const std::string& cause)
    : std::runtime_error("base learner failed on replica " + std::to_string(replica) + ": " + cause),
      replica_(replica) {}

EnsembleModel train_ensemble(const DatasetTable& train, const Learner& base_learner, const EnsembleParams& params) {
    params.validate();
    if (train.empty()) {
        throw std::invalid_argument("train_ensemble: empty training table");
    }
    const auto counts = train.class_counts();
    std::vector<double> priors(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
        priors[c] = static_cast<double>(counts[c]) / static_cast<double>(train.size());
    }

    auto fit_replica = [&](std::size_t t) -> ClassifierPtr {
        try {
            const DatasetTable sample = bootstrap_sample(train, replica_bootstrap_seed(params.seed, t));
            return base_learner.fit(sample, replica_learner_seed(params.seed, t));
        } catch (const std::exception& e) {
            throw ReplicaFailure(t, e.what());
        }
    };

    std::vector<ClassifierPtr> members(params.replicas);
    if (params.workers <= 1) {
        for (std::size_t t = 0; t < params.replicas; ++t) {
            members[t] = fit_replica(t);
        }
    } else {
        for (std::size_t start = 0; start < params.replicas; start += params.workers) {
            const std::size_t stop = std::min(params.replicas, start + params.workers);
            std::vector<std::future<ClassifierPtr>> batch;
            for (std::size_t t = start; t < stop; ++t) {
                batch.push_back(std::async(std::launch::async, fit_replica, t));
            }
            std::optional<ReplicaFailure> failure;
            for (std::size_t t = start; t < stop; ++t) {
                try {
                    members[t] = batch[t - start].get();
                } catch (const ReplicaFailure& e) {
                    if (!failure) {
                        failure = e;
                    }
                }
            }
            if (failure) {
                throw *failure;
            }
        }
    }
    return EnsembleModel(train.schema_ptr(), std::move(members), std::move(priors), params.seed);
}

BaggedLearner::BaggedLearner(LearnerPtr base, std::size_t replicas, std::size_t workers)
    : base_(std::move(base)), replicas_(replicas), workers_(workers) {
    if (!base_) {
        throw std::invalid_argument("bagged learner needs a base learner");
    }
    EnsembleParams{replicas_, 0, workers_}.validate();
}

ClassifierPtr BaggedLearner::fit(const DatasetTable& data, Seed seed) const {
    return std::make_shared<EnsembleModel>(train_ensemble(data, *base_, EnsembleParams{replicas_, seed, workers_}));
}

std::string to_text(const EnsembleModel& model) {
    std::ostringstream out;
    out << "ENSEMBLE\n";
    out << "REPLICAS " << model.size() << "\n";
    out << "SEED " << model.master_seed() << "\n";
    out << "PRIORS";
    for (double p : model.training_priors()) {
        out << ' ' << format_double(p);
    }
    out << "\n";
    for (std::size_t t = 0; t < model.size(); ++t) {
        const auto* rules = dynamic_cast<const RuleListModel*>(model.members()[t].get());
        if (rules == nullptr) {
            throw std::invalid_argument("only rule-list members can be serialized");
        }
        out << "MEMBER " << t << "\n" << to_text(*rules) << "END MEMBER\n";
    }
    return out.str();
}

EnsembleModel parse_ensemble(std::string_view text, SchemaPtr schema) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty()) {
                return line;
            }
        }
        throw ParseError("ensemble", line_no, 0, "unexpected end of manifest");
    };
    auto expect_prefix = [&](const std::string& l, const std::string& prefix) {
        if (l.rfind(prefix, 0) != 0) {
            throw ParseError("ensemble", line_no, 0, "expected '" + prefix + "'");
        }
        return l.substr(prefix.size());
    };

    if (next() != "ENSEMBLE") {
        throw ParseError("ensemble", line_no, 0, "expected 'ENSEMBLE'");
    }
    std::size_t replicas = 0;
    Seed seed = 0;
    try {
        replicas = std::stoull(expect_prefix(next(), "REPLICAS "));
        seed = std::stoull(expect_prefix(next(), "SEED "));
    } catch (const std::logic_error&) {
        throw ParseError("ensemble", line_no, 0, "bad number");
    }
    std::vector<double> priors;
    {
        std::istringstream ps(expect_prefix(next(), "PRIORS"));
        std::string tok;
        while (ps >> tok) {
            double v = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
                throw ParseError("ensemble", line_no, 0, "bad prior '" + tok + "'");
            }
            priors.push_back(v);
        }
    }
    std::vector<ClassifierPtr> members;
    for (std::size_t t = 0; t < replicas; ++t) {
        if (next() != "MEMBER " + std::to_string(t)) {
            throw ParseError("ensemble", line_no, 0, "expected 'MEMBER " + std::to_string(t) + "'");
        }
        std::string body;
        for (std::string l = next(); l != "END MEMBER"; l = next()) {
            body += l;
            body += '\n';
        }
        members.push_back(std::make_shared<RuleListModel>(parse_rule_list(body, schema)));
    }
    try {
        return EnsembleModel(std::move(schema), std::move(members), std::move(priors), seed);
    } catch (const std::invalid_argument& e) {
        throw ParseError("ensemble", 0, 0, e.what());
    }
}

}  // namespace eam
