#include "commsense/classify.hpp"

#include <limits>
#include <numeric>

namespace commsense {

NnModel NnModel::fit(std::vector<FeatureVector> training, int n_classes) {
    if (training.empty())
        throw InsufficientDataError("classify: empty training set");
    const Eigen::Index dim = training.front().scores.size();
    for (const FeatureVector& fv : training) {
        if (fv.scores.size() != dim)
            throw ShapeError("classify: ragged training score lengths");
        if (fv.label < 0 || fv.label >= n_classes)
            throw LabelError("classify: training label outside class set");
    }
    return {std::move(training), n_classes};
}

long ConfusionMatrix::total() const {
    long t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

long ConfusionMatrix::trace() const {
    long t = 0;
    for (size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

double l1_distance(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size())
        throw ShapeError("classify: vector lengths differ");
    return (a - b).cwiseAbs().sum();
}

int predict(const NnModel& model, const FeatureVector& fv) {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (const FeatureVector& train : model.training) {
        const double d = l1_distance(train.scores, fv.scores);
        if (d < best) {
            best = d;
            label = train.label;
        }
    }
    return label;
}

ConfusionMatrix confusion(const NnModel& model, const std::vector<FeatureVector>& test) {
    if (test.empty())
        throw EmptyInputError("classify: empty test set");
    ConfusionMatrix cm;
    cm.counts.assign(model.n_classes, std::vector<long>(model.n_classes, 0));
    for (const FeatureVector& fv : test) {
        if (fv.label < 0 || fv.label >= model.n_classes)
            throw LabelError("classify: unknown test label");
        ++cm.counts[fv.label][predict(model, fv)];
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0)
        throw EmptyInputError("classify: empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double far(const ConfusionMatrix& cm) {
    if (cm.n_classes() < 2)
        throw ShapeError("classify: FAR needs at least two classes");
    const long impostor = std::accumulate(cm.counts[0].begin(), cm.counts[0].end(), 0L);
    if (impostor == 0)
        throw UndefinedMetricError("classify: no impostor attempts");
    return static_cast<double>(impostor - cm.counts[0][0]) / static_cast<double>(impostor);
}

double frr(const ConfusionMatrix& cm) {
    if (cm.n_classes() < 2)
        throw ShapeError("classify: FRR needs at least two classes");
    long rejected = 0, genuine = 0;
    for (int c = 1; c < cm.n_classes(); ++c) {
        rejected += cm.counts[c][0];
        genuine += std::accumulate(cm.counts[c].begin(), cm.counts[c].end(), 0L);
    }
    if (genuine == 0)
        throw UndefinedMetricError("classify: no genuine attempts");
    return static_cast<double>(rejected) / static_cast<double>(genuine);
}

EvalReport evaluate(const NnModel& model, const std::vector<FeatureVector>& test) {
    EvalReport report;
    report.matrix = confusion(model, test);
    report.accuracy = accuracy(report.matrix);
    report.far = far(report.matrix);
    report.frr = frr(report.matrix);
    return report;
}

} // namespace commsense
