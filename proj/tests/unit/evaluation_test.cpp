#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "eam/antminer.hpp"
#include "eam/csv.hpp"
#include "eam/ensemble.hpp"
#include "eam/evaluation.hpp"
#include "helpers.hpp"

using namespace eam;
using eam::test::continuous_table;
using eam::test::labelled_rows;
using eam::test::load_fixture;

namespace {

class ConstantLearner final : public Learner {
public:
    explicit ConstantLearner(std::size_t label) : label_(label) {}
    std::string name() const override { return "const"; }
    ClassifierPtr fit(const DatasetTable& data, Seed) const override {
        return std::make_shared<ConstantClassifier>(data.schema_ptr(), label_);
    }

private:
    std::size_t label_;
};

// Rows carry x = 2 * id + label. The model answers correctly only for x values
// it was trained on, so any test error below 1 means train and test overlap.
class Memorizer final : public Classifier {
public:
    explicit Memorizer(std::set<double> seen) : seen_(std::move(seen)) {}
    std::size_t predict(const InstanceRow& row) const override {
        const auto label = static_cast<std::size_t>(std::fmod(row.values[0], 2.0));
        return seen_.count(row.values[0]) ? label : 1 - label;
    }
    std::size_t term_count() const override { return seen_.size(); }

private:
    std::set<double> seen_;
};

class MemorizingLearner final : public Learner {
public:
    std::string name() const override { return "memo"; }
    ClassifierPtr fit(const DatasetTable& data, Seed) const override {
        std::set<double> seen;
        for (const auto& r : data.rows()) {
            seen.insert(r.values[0]);
        }
        return std::make_shared<Memorizer>(seen);
    }
};

DatasetTable encoded_table(std::size_t n) {
    std::vector<double> x;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(i % 3 == 0 ? 1 : 0);
        x.push_back(static_cast<double>(2 * i + labels.back()));
    }
    return continuous_table(x, labels, 2);
}

AntMinerLearner desk_learner() {
    AntMinerParams p;
    p.num_ants = 200;
    return AntMinerLearner(p);
}

}  // namespace

TEST_CASE("test error counts misclassified rows") {
    std::vector<std::size_t> labels(100, 0);
    for (std::size_t i = 0; i < 5; ++i) {
        labels[i] = 1;
    }
    const DatasetTable t = labelled_rows(labels, 2);
    const ConstantClassifier zero(t.schema_ptr(), 0);
    CHECK(test_error(zero, t) == doctest::Approx(0.05));

    const DatasetTable balanced = labelled_rows({0, 1, 0, 1, 1, 0}, 2);
    CHECK(test_error(ConstantClassifier(balanced.schema_ptr(), 1), balanced) == 0.5);

    const DatasetTable iris = load_fixture("iris");
    const RuleListModel perfect(iris.schema_ptr(),
                                {Rule{{Term::less(2, 2.45)}, 0, 1}, Rule{{Term::less(3, 1.75)}, 1, 1}}, 2);
    const DatasetTable easy = iris.subset(std::vector<std::size_t>{0, 1, 2, 50, 51, 100, 101});
    CHECK(test_error(perfect, easy) == 0.0);
}

TEST_CASE("majority predictor on iris CV errs two thirds of the time") {
    const DatasetTable iris = load_fixture("iris");
    const EvaluationResult r = cross_validate(iris, MajorityClassLearner{}, 10, 3, 4);
    CHECK(r.protocol == "cv");
    CHECK(r.errors.dataset == "iris");
    CHECK(r.errors.algorithm == "majority");
    CHECK(r.errors.run_count() == 30);
    CHECK(r.errors.mean_error() == doctest::Approx(2.0 / 3.0));
    CHECK(r.sizes.mean_terms() == 0.0);
}

TEST_CASE("cross-validation rejects k below 2") {
    const DatasetTable iris = load_fixture("iris");
    CHECK_THROWS_AS(cross_validate(iris, MajorityClassLearner{}, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(cross_validate(iris, MajorityClassLearner{}, 10, 0, 1), std::invalid_argument);
}

TEST_CASE("property: CV train and test folds are disjoint") {
    const DatasetTable t = encoded_table(60);
    for (Seed seed = 0; seed < 5; ++seed) {
        const EvaluationResult r = cross_validate(t, MemorizingLearner{}, 5, 2, seed);
        for (const auto& iteration : r.errors.per_run_errors) {
            for (double e : iteration) {
                CHECK(e == 1.0);
            }
        }
    }
    const EvaluationResult h = evaluate_holdout(t, MemorizingLearner{}, 3, 1);
    for (const auto& iteration : h.errors.per_run_errors) {
        CHECK(iteration.at(0) == 1.0);
    }
}

TEST_CASE("property: mean error is the mean of the runs") {
    const DatasetTable wine = load_fixture("wine");
    const EvaluationResult r = cross_validate(wine, desk_learner(), 5, 2, 3);
    double sum = 0;
    std::size_t n = 0;
    for (const auto& it : r.errors.per_run_errors) {
        for (double e : it) {
            sum += e;
            ++n;
        }
    }
    CHECK(std::abs(r.errors.mean_error() - sum / static_cast<double>(n)) < 1e-12);
}

TEST_CASE("reports are reproducible from the seed") {
    const DatasetTable glass = load_fixture("glass");
    const auto a = cross_validate(glass, desk_learner(), 10, 2, 17);
    const auto b = cross_validate(glass, desk_learner(), 10, 2, 17);
    CHECK(a.errors.per_run_errors == b.errors.per_run_errors);
    CHECK(a.sizes.per_run_terms == b.sizes.per_run_terms);
    const auto c = cross_validate(glass, desk_learner(), 10, 2, 18);
    CHECK(c.errors.per_run_errors != a.errors.per_run_errors);

    const auto e1 = evaluate_ensemble(glass, desk_learner(), 3, 2, 5);
    const auto e2 = evaluate_ensemble(glass, desk_learner(), 3, 2, 5);
    CHECK(e1.errors.per_run_errors == e2.errors.per_run_errors);
}

TEST_CASE("model size standard error") {
    ModelSizeReport s;
    s.per_run_terms = {{2, 4}, {6}};
    s.per_run_total_terms = {{2, 4}, {6}};
    CHECK(s.mean_terms() == doctest::Approx(4.0));
    // sample sd = 2, N = 3
    CHECK(s.std_error() == doctest::Approx(2.0 / std::sqrt(3.0)));
    ModelSizeReport single;
    single.per_run_terms = {{3}};
    CHECK(single.std_error() == 0.0);
}

TEST_CASE("constant base learner makes the ensemble match it") {
    const DatasetTable wine = load_fixture("wine");
    const auto single = evaluate_holdout(wine, ConstantLearner(1), 4, 9);
    const auto ensemble = evaluate_ensemble(wine, ConstantLearner(1), 10, 4, 9);
    CHECK(ensemble.errors.per_run_errors == single.errors.per_run_errors);
    CHECK(ensemble.errors.algorithm == "econst");
    CHECK(ensemble.protocol == "holdout");
}

TEST_CASE("one-member ensemble equals the bagged learner under hold-out") {
    const DatasetTable iris = load_fixture("iris");
    const auto base = std::make_shared<AntMinerLearner>(desk_learner());
    const auto direct = evaluate_ensemble(iris, *base, 1, 3, 12);
    const auto wrapped = evaluate_holdout(iris, BaggedLearner(base, 1), 3, 12);
    CHECK(direct.errors.per_run_errors == wrapped.errors.per_run_errors);
    CHECK(direct.sizes.per_run_terms == wrapped.sizes.per_run_terms);
}

TEST_CASE("ensemble terms are reported per member") {
    const DatasetTable iris = load_fixture("iris");
    const auto r = evaluate_ensemble(iris, desk_learner(), 10, 2, 3);
    REQUIRE(r.sizes.per_run_terms.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(r.sizes.per_run_terms[i][0] == doctest::Approx(r.sizes.per_run_total_terms[i][0] / 10.0));
    }
    // cross-check against a direct library call
    const auto [train, test] = holdout_split(iris, 0.7, holdout_split_seed(3, 0));
    const EnsembleModel model =
        train_ensemble(train, desk_learner(), EnsembleParams{10, holdout_learner_seed(3, 0)});
    CHECK(r.errors.per_run_errors[0][0] == test_error(model, test));
    CHECK(r.sizes.per_run_terms[0][0] == model.mean_member_terms());
}

TEST_CASE("stability curve shape") {
    const DatasetTable iris = load_fixture("iris");
    const StabilityCurve flat = stability_curve(iris, MajorityClassLearner{}, 2);
    REQUIRE(flat.per_fold_errors.size() == 10);
    for (double e : flat.per_fold_errors) {
        CHECK(e == doctest::Approx(2.0 / 3.0));
    }
    CHECK(flat.variance() == doctest::Approx(0.0));

    const StabilityCurve curve = stability_curve(iris, desk_learner(), 2);
    const auto cv = cross_validate(iris, desk_learner(), 10, 1, 2);
    CHECK(curve.per_fold_errors == cv.errors.per_run_errors.front());
}

TEST_CASE("output formats") {
    CHECK(format_percent(0.10667) == "10.67");
    CHECK(format_percent(0.0) == "0.00");

    const DatasetTable iris = load_fixture("iris");
    const auto r = cross_validate(iris, MajorityClassLearner{}, 3, 2, 1);
    std::ostringstream out;
    const std::vector<EvaluationResult> results{r};
    write_runs_csv(out, results);
    const auto recs = csv::parse(out.str());
    REQUIRE(recs.size() == 7);
    CHECK(recs[0].fields == csv::Record{"dataset", "algorithm", "iteration", "run", "error", "terms"});
    CHECK(recs[6].fields[0] == "iris");
    CHECK(recs[6].fields[2] == "1");
    CHECK(recs[6].fields[3] == "2");

    std::ostringstream stamped;
    const std::vector<std::pair<std::string, std::string>> extra{{"seed", "1"}};
    write_runs_csv(stamped, results, extra);
    const auto srecs = csv::parse(stamped.str());
    CHECK(srecs[0].fields.back() == "seed");
    CHECK(srecs[3].fields.back() == "1");

    std::ostringstream dat;
    const std::vector<std::string> comments{"seed 5"};
    write_curve_data(dat, StabilityCurve{"iris", "cAM", {0.5, 0.25}}, comments);
    CHECK(dat.str() == "# seed 5\n# fold error (iris, cAM)\n1 0.5\n2 0.25\n");
}

TEST_CASE("statistics helpers") {
    const std::vector<double> xs{1, 2, 3, 4};
    CHECK(mean(xs) == 2.5);
    CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0));
    CHECK(sample_variance(std::vector<double>{3}) == 0.0);
}
