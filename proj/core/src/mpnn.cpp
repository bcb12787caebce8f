#include "didm/mpnn.hpp"

#include <cmath>
#include <random>

namespace didm {

namespace {

Eigen::MatrixXd glorot_uniform(Eigen::Index out, Eigen::Index in, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(out, in);
    for (Eigen::Index i = 0; i < out; ++i) {
        for (Eigen::Index j = 0; j < in; ++j) w(i, j) = dist(rng);
    }
    return w;
}

Eigen::VectorXd bias_uniform(Eigen::Index out, Eigen::Index fan_in, std::mt19937_64& rng) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::VectorXd b(out);
    for (Eigen::Index i = 0; i < out; ++i) b[i] = dist(rng);
    return b;
}

AffineStage make_stage(Eigen::Index out, Eigen::Index in, Activation act, std::mt19937_64& rng) {
    AffineStage st;
    st.weight = glorot_uniform(out, in, rng);
    st.bias = bias_uniform(out, in, rng);
    st.act = act;
    return st;
}

UpdateLayer make_readout(int hidden, int out_dim, std::mt19937_64& rng) {
    if (out_dim <= 0 || out_dim == hidden) return UpdateLayer::identity_layer();
    UpdateLayer psi;
    psi.combine = InputCombine::single;
    psi.stages.push_back(make_stage(out_dim, hidden, Activation::identity, rng));
    return psi;
}

}  // namespace

Eigen::MatrixXd AffineStage::apply(const Eigen::MatrixXd& rows) const {
    Eigen::MatrixXd out = rows * weight.transpose();
    out.rowwise() += bias.transpose();
    if (act == Activation::relu) out = out.cwiseMax(0.0);
    return out;
}

UpdateLayer UpdateLayer::identity_layer() { return UpdateLayer{}; }

Eigen::Index UpdateLayer::input_dim() const {
    if (stages.empty()) return -1;  // identity: any dim
    const Eigen::Index stage_in = stages.front().weight.cols();
    return combine == InputCombine::concat ? stage_in / 2 : stage_in;
}

Eigen::Index UpdateLayer::output_dim() const {
    if (stages.empty()) return -1;
    return stages.back().weight.rows();
}

Eigen::MatrixXd UpdateLayer::apply(const Eigen::MatrixXd& self,
                                   const Eigen::MatrixXd& aggregate) const {
    Eigen::MatrixXd z;
    switch (combine) {
        case InputCombine::single:
            z = self;
            break;
        case InputCombine::sum:
            z = self + aggregate;
            break;
        case InputCombine::concat:
            z.resize(self.rows(), self.cols() + aggregate.cols());
            z << self, aggregate;
            break;
    }
    for (const AffineStage& st : stages) z = st.apply(z);
    if (residual) {
        if (z.rows() != self.rows() || z.cols() != self.cols()) {
            throw contract_error("residual layer needs matching input/output dims");
        }
        z += self;
    }
    return z;
}

double UpdateLayer::lip_bound() const {
    double lip = 1.0;
    for (const AffineStage& st : stages) lip *= spectral_norm(st.weight);
    if (residual) lip += 1.0;
    return lip;
}

double UpdateLayer::formal_bias() const {
    Eigen::Index d = input_dim();
    if (d < 0) return 0.0;  // identity layer
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, d);
    return apply(zero, zero).row(0).norm();
}

void MpnnModel::validate() const {
    if (layers.empty()) throw contract_error("MPNN model needs at least one layer");
    Eigen::Index dim = encoder.stages.empty() ? -1 : encoder.output_dim();
    for (std::size_t t = 0; t < layers.size(); ++t) {
        const UpdateLayer& l = layers[t];
        if (l.stages.empty()) continue;
        if (dim >= 0 && l.input_dim() != dim) {
            throw contract_error("layer " + std::to_string(t + 1) + " expects input dim " +
                                 std::to_string(l.input_dim()) + ", got " + std::to_string(dim));
        }
        dim = l.output_dim();
    }
    if (!readout.stages.empty() && dim >= 0 && readout.input_dim() != dim) {
        throw contract_error("readout input dim mismatch");
    }
}

ForwardResult forward(const MpnnModel& model, const GraphSignal& g) {
    const Eigen::Index n = g.node_count();
    const Eigen::Index enc_in = model.encoder.stages.empty() ? g.attr_dim()
                                                             : model.encoder.input_dim();
    if (enc_in != g.attr_dim()) {
        throw contract_error("model expects attr_dim " + std::to_string(enc_in) + ", graph has " +
                             std::to_string(g.attr_dim()));
    }
    ForwardResult result;
    Eigen::MatrixXd x = model.encoder.apply(g.attributes, g.attributes);
    result.layer_features.push_back(x);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (const UpdateLayer& layer : model.layers) {
        const Eigen::MatrixXd aggregate = (g.adjacency * x) * inv_n;
        x = layer.apply(x, aggregate);
        result.layer_features.push_back(x);
    }
    result.node_features = x;
    const Eigen::MatrixXd pooled = x.colwise().mean();
    result.graph_output = model.readout.apply(pooled, pooled).row(0).transpose();
    return result;
}

LipschitzConstants lipschitz_constants(const MpnnModel& model, double attr_radius) {
    if (!(attr_radius > 0.0)) throw contract_error("attribute radius must be positive");
    LipschitzConstants out;
    const double l0 = model.encoder.lip_bound();
    double bound = attr_radius * l0 + model.encoder.formal_bias();
    double lip = l0;
    out.feature_bounds.push_back(bound);
    out.lipschitz.push_back(lip);
    for (const UpdateLayer& layer : model.layers) {
        const double lt = layer.lip_bound();
        const double bt = layer.formal_bias();
        const double new_lip = 2.0 * lt * (bound + lip);
        const double new_bound = 2.0 * lt * bound + bt;
        lip = new_lip;
        bound = new_bound;
        out.feature_bounds.push_back(bound);
        out.lipschitz.push_back(lip);
    }
    const double lpsi = model.readout.lip_bound();
    out.model_lipschitz = lpsi * (bound + lip);
    out.model_bound = lpsi * bound + model.readout.formal_bias();
    return out;
}

MpnnModel init_gin_meanpool(int layers, int hidden, int attr_dim, int out_dim,
                            std::uint64_t seed) {
    if (layers < 1) throw contract_error("need at least one layer");
    if (hidden < 1 || attr_dim < 1) throw contract_error("hidden and attr_dim must be positive");
    std::mt19937_64 rng(seed);
    MpnnModel model;
    model.family = MpnnModel::Family::gin_meanpool;
    model.seed = seed;
    model.encoder.combine = InputCombine::single;
    model.encoder.stages.push_back(make_stage(hidden, attr_dim, Activation::identity, rng));
    for (int t = 1; t <= layers; ++t) {
        UpdateLayer layer;
        layer.combine = InputCombine::sum;
        layer.stages.push_back(make_stage(hidden, hidden, Activation::relu, rng));
        layer.stages.push_back(make_stage(hidden, hidden, Activation::relu, rng));
        layer.residual = t >= 2;
        model.layers.push_back(std::move(layer));
    }
    model.readout = make_readout(hidden, out_dim, rng);
    model.validate();
    return model;
}

MpnnModel init_gc_meanpool(int layers, int hidden, int attr_dim, int out_dim,
                           std::uint64_t seed) {
    if (layers < 1) throw contract_error("need at least one layer");
    if (hidden < 1 || attr_dim < 1) throw contract_error("hidden and attr_dim must be positive");
    std::mt19937_64 rng(seed);
    MpnnModel model;
    model.family = MpnnModel::Family::gc_meanpool;
    model.seed = seed;
    model.encoder.combine = InputCombine::single;
    model.encoder.stages.push_back(make_stage(hidden, attr_dim, Activation::identity, rng));
    for (int t = 1; t <= layers; ++t) {
        UpdateLayer layer;
        layer.combine = InputCombine::concat;
        layer.stages.push_back(make_stage(hidden, 2 * hidden, Activation::identity, rng));
        layer.residual = t >= 2;
        model.layers.push_back(std::move(layer));
    }
    model.readout = make_readout(hidden, out_dim, rng);
    model.validate();
    return model;
}

double spectral_norm(const Eigen::MatrixXd& a, int max_iters, double tol) {
    if (a.size() == 0) return 0.0;
    const Eigen::MatrixXd gram = a.transpose() * a;
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    const double vnorm = v.norm();
    if (vnorm == 0.0) return 0.0;
    v /= vnorm;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd w = gram * v;
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        w /= wn;
        const double step = (w - v).norm();  // gram is PSD, no sign flips
        v = std::move(w);
        if (step <= tol) break;
    }
    return std::sqrt(std::max(v.dot(gram * v), 0.0));
}

double attribute_radius(const Dataset& ds) {
    double r = 0.0;
    for (const GraphSignal& g : ds.graphs) {
        for (Eigen::Index v = 0; v < g.node_count(); ++v) {
            r = std::max(r, g.attributes.row(v).norm());
        }
    }
    return r;
}

}  // namespace didm
