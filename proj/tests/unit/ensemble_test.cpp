#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "eam/antminer.hpp"
#include "eam/ensemble.hpp"
#include "helpers.hpp"

using namespace eam;
using eam::test::load_fixture;
using eam::test::nominal_table;

namespace {

std::size_t brute_force_vote(const std::vector<std::size_t>& votes, const std::vector<double>& priors) {
    std::vector<std::size_t> counts(priors.size(), 0);
    for (auto v : votes) {
        ++counts[v];
    }
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    std::vector<std::size_t> tied;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == top) {
            tied.push_back(c);
        }
    }
    std::size_t best = tied.front();
    for (auto c : tied) {
        if (priors[c] > priors[best]) {
            best = c;
        }
    }
    return best;
}

class FailingLearner final : public Learner {
public:
    std::string name() const override { return "broken"; }
    ClassifierPtr fit(const DatasetTable&, Seed) const override { throw std::runtime_error("no model"); }
};

/// Records the size of every training table it sees.
class SizeProbe final : public Learner {
public:
    std::string name() const override { return "probe"; }
    ClassifierPtr fit(const DatasetTable& data, Seed) const override {
        sizes->push_back(data.size());
        return std::make_shared<ConstantClassifier>(data.schema_ptr(), data.majority_class());
    }
    std::shared_ptr<std::vector<std::size_t>> sizes = std::make_shared<std::vector<std::size_t>>();
};

AntMinerParams desk_params() {
    AntMinerParams p;
    p.num_ants = 200;
    return p;
}

}  // namespace

TEST_CASE("majority vote basics") {
    const std::vector<double> priors{0.5, 0.5};
    // yes = 0, no = 1
    CHECK(majority_vote(std::vector<std::size_t>{0, 1, 0, 1, 0}, priors) == 0);
    CHECK(majority_vote(std::vector<std::size_t>{1, 1, 1}, priors) == 1);
    CHECK(majority_vote(std::vector<std::size_t>{0}, priors) == 0);
    CHECK(majority_vote(std::vector<std::size_t>{0, 0, 1}, priors) == 0);
    CHECK_THROWS(majority_vote(std::vector<std::size_t>{}, priors));
    CHECK_THROWS(majority_vote(std::vector<std::size_t>{2}, priors));
}

TEST_CASE("majority vote equals count argmax for every 5-vote binary outcome") {
    const std::vector<double> priors{0.3, 0.7};
    for (unsigned mask = 0; mask < 32; ++mask) {
        std::vector<std::size_t> votes;
        std::size_t ones = 0;
        for (int b = 0; b < 5; ++b) {
            votes.push_back((mask >> b) & 1U);
            ones += (mask >> b) & 1U;
        }
        CHECK(majority_vote(votes, priors) == (ones >= 3 ? 1U : 0U));
    }
}

TEST_CASE("4-member ties follow the training prior then domain order") {
    for (const std::vector<double>& priors : {std::vector<double>{0.4, 0.6}, std::vector<double>{0.6, 0.4},
                                              std::vector<double>{0.5, 0.5}}) {
        for (unsigned mask = 0; mask < 16; ++mask) {
            std::vector<std::size_t> votes;
            for (int b = 0; b < 4; ++b) {
                votes.push_back((mask >> b) & 1U);
            }
            const std::size_t expected = brute_force_vote(votes, priors);
            CHECK(majority_vote(votes, priors) == expected);
            if (std::count(votes.begin(), votes.end(), 1U) == 2) {
                CHECK(expected == (priors[1] > priors[0] ? 1U : 0U));
            }
        }
    }
}

TEST_CASE("property: majority vote ignores vote order") {
    std::mt19937_64 gen(1);
    const std::vector<double> priors{0.2, 0.5, 0.3};
    for (int i = 0; i < 200; ++i) {
        std::vector<std::size_t> votes(1 + gen() % 9);
        for (auto& v : votes) {
            v = gen() % 3;
        }
        const std::size_t result = majority_vote(votes, priors);
        CHECK(result == brute_force_vote(votes, priors));
        std::shuffle(votes.begin(), votes.end(), gen);
        CHECK(majority_vote(votes, priors) == result);
    }
}

TEST_CASE("single-member ensemble predicts like its member") {
    const DatasetTable iris = load_fixture("iris");
    const auto [train, test] = holdout_split(iris, 0.7, 3);
    const AntMinerLearner learner(desk_params());
    const EnsembleModel e = train_ensemble(train, learner, EnsembleParams{1, 11});
    REQUIRE(e.size() == 1);
    for (const auto& row : test.rows()) {
        CHECK(e.predict(row) == e.members()[0]->predict(row));
    }
    const auto& member = dynamic_cast<const RuleListModel&>(*e.members()[0]);
    for (const auto& row : train.rows()) {
        CHECK(e.predict(row) == classify(member, row));
    }
}

TEST_CASE("members train on bootstrap samples of the training size") {
    const DatasetTable iris = load_fixture("iris");
    const auto [train, test] = holdout_split(iris, 0.7, 3);
    SizeProbe probe;
    const EnsembleModel e = train_ensemble(train, probe, EnsembleParams{10, 5});
    CHECK(e.size() == 10);
    CHECK(*probe.sizes == std::vector<std::size_t>(10, 105));
}

TEST_CASE("replica seeds differ and training is deterministic") {
    CHECK(replica_bootstrap_seed(1, 0) != replica_bootstrap_seed(1, 1));
    CHECK(replica_bootstrap_seed(1, 0) != replica_learner_seed(1, 0));

    const DatasetTable wine = load_fixture("wine");
    const AntMinerLearner learner(desk_params());
    const EnsembleModel a = train_ensemble(wine, learner, EnsembleParams{5, 21});
    const EnsembleModel b = train_ensemble(wine, learner, EnsembleParams{5, 21});
    CHECK(to_text(a) == to_text(b));
    for (const auto& row : wine.rows()) {
        CHECK(a.votes(row) == b.votes(row));
    }
}

TEST_CASE("concurrent member training gives the same ensemble") {
    const DatasetTable wine = load_fixture("wine");
    const AntMinerLearner learner(desk_params());
    const EnsembleModel serial = train_ensemble(wine, learner, EnsembleParams{6, 8, 1});
    const EnsembleModel parallel = train_ensemble(wine, learner, EnsembleParams{6, 8, 4});
    CHECK(to_text(serial) == to_text(parallel));
}

TEST_CASE("votes sum to the ensemble size") {
    const DatasetTable iris = load_fixture("iris");
    const AntMinerLearner learner(desk_params());
    const EnsembleModel e = train_ensemble(iris, learner, EnsembleParams{7, 2});
    for (const auto& row : iris.rows()) {
        const auto votes = e.votes(row);
        CHECK(votes.size() == 7);
        CHECK(e.predict(row) == majority_vote(votes, e.training_priors()));
    }
    CHECK(e.term_count() >= e.size());
    CHECK(e.mean_member_terms() == doctest::Approx(static_cast<double>(e.term_count()) / 7.0));
}

TEST_CASE("priors come from the training table") {
    const DatasetTable t = nominal_table({2}, {{0}, {1}, {0}, {1}, {0}, {0}, {1}, {1}, {1}, {1}},
                                         {0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, 2);
    const EnsembleModel e = train_ensemble(t, MajorityClassLearner{}, EnsembleParams{3, 1});
    CHECK(e.training_priors() == std::vector<double>{0.4, 0.6});
    CHECK(e.class_domain() == t.schema().class_attribute().domain());
}

TEST_CASE("base learner failures name the replica") {
    const DatasetTable iris = load_fixture("iris");
    CHECK_THROWS_WITH_AS(train_ensemble(iris, FailingLearner{}, EnsembleParams{3, 1}),
                         doctest::Contains("replica 0"), ReplicaFailure);
    try {
        train_ensemble(iris, FailingLearner{}, EnsembleParams{3, 1, 2});
        FAIL("expected failure");
    } catch (const ReplicaFailure& e) {
        CHECK(e.replica() == 0);
    }
    CHECK_THROWS_AS(train_ensemble(iris, MajorityClassLearner{}, EnsembleParams{0, 1}), std::invalid_argument);
}

TEST_CASE("bagged learner adapter") {
    const DatasetTable iris = load_fixture("iris");
    const BaggedLearner bagged(std::make_shared<AntMinerLearner>(desk_params()), 4);
    CHECK(bagged.name() == "ecAM");
    const ClassifierPtr m = bagged.fit(iris, 6);
    const auto& e = dynamic_cast<const EnsembleModel&>(*m);
    CHECK(e.size() == 4);
    CHECK(e.master_seed() == 6);
    CHECK_THROWS(BaggedLearner(nullptr, 4));
}

TEST_CASE("ensemble manifest round-trips") {
    const DatasetTable glass = load_fixture("glass");
    const AntMinerLearner learner(desk_params());
    const EnsembleModel e = train_ensemble(glass, learner, EnsembleParams{3, 99});
    const std::string text = to_text(e);
    const EnsembleModel back = parse_ensemble(text, glass.schema_ptr());
    CHECK(to_text(back) == text);
    CHECK(back.master_seed() == 99);
    CHECK(back.training_priors() == e.training_priors());
    for (const auto& row : glass.rows()) {
        CHECK(back.predict(row) == e.predict(row));
    }
    CHECK_THROWS_AS(parse_ensemble("ENSEMBLE\nREPLICAS 1\n", glass.schema_ptr()), ParseError);
    CHECK_THROWS_AS(parse_ensemble("MODEL\n", glass.schema_ptr()), ParseError);
}
