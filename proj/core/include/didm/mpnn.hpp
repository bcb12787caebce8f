#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "didm/graph.hpp"

namespace didm {

enum class Activation { identity, relu };

/// One affine map followed by an activation; acts row-wise on feature
/// matrices (one row per node).
struct AffineStage {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
    Activation act = Activation::identity;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

enum class InputCombine {
    single,  // stages act on the self feature only (encoder / readout)
    sum,     // stages act on self + aggregate
    concat,  // stages act on [self, aggregate]
};

/// An update function: how the (self, aggregate) pair enters, an affine
/// stage chain, and an optional skip connection adding the self feature.
/// lip_bound() is an upper bound on the Lipschitz constant with respect to
/// the sum product metric ||dx|| + ||dy||; formal_bias() is the exact value
/// of ||layer(0)||_2.
struct UpdateLayer {
    InputCombine combine = InputCombine::single;
    std::vector<AffineStage> stages;
    bool residual = false;

    Eigen::Index input_dim() const;
    Eigen::Index output_dim() const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& self, const Eigen::MatrixXd& aggregate) const;
    double lip_bound() const;
    double formal_bias() const;

    static UpdateLayer identity_layer();
};

struct MpnnModel {
    enum class Family { gin_meanpool, gc_meanpool, custom };

    Family family = Family::custom;
    UpdateLayer encoder;               // phi^(0)
    std::vector<UpdateLayer> layers;   // phi^(1) .. phi^(L)
    UpdateLayer readout;               // psi applied after mean pooling
    std::uint64_t seed = 0;

    int depth() const { return static_cast<int>(layers.size()); }
    void validate() const;  // dimension chaining
};

struct ForwardResult {
    Eigen::MatrixXd node_features;  // N x d_L
    Eigen::VectorXd graph_output;   // d_out
    std::vector<Eigen::MatrixXd> layer_features;  // per layer t=0..L, N x d_t
};

/// Message passing with normalized sum aggregation:
/// aggregate_v = (1/N) sum_u a_{vu} x_u; readout = psi(mean of node rows).
ForwardResult forward(const MpnnModel& model, const GraphSignal& g);

struct LipschitzConstants {
    std::vector<double> feature_bounds;  // B^0 .. B^L
    std::vector<double> lipschitz;       // C^0 .. C^L
    double model_bound = 0.0;            // B_(phi,psi)
    double model_lipschitz = 0.0;        // C_(phi,psi)
};

/// The inductive bound/Lipschitz ladder:
///   B^0 = r L0 + b0,        B^t = 2 Lt B^{t-1} + bt
///   C^0 = L0,               C^t = 2 Lt (B^{t-1} + C^{t-1})
///   C_model = Lpsi (B^L + C^L),  B_model = Lpsi B^L + bpsi
/// with each layer's lip_bound and formal_bias standing in for the exact
/// Lipschitz constant and bias (upper bounds, so every inequality survives).
LipschitzConstants lipschitz_constants(const MpnnModel& model, double attr_radius);

/// GIN-style model: per layer a two-stage ReLU MLP on (self + aggregate),
/// skip connections from the second layer on, mean-pool readout (identity
/// when out_dim == hidden, affine otherwise).
MpnnModel init_gin_meanpool(int layers, int hidden, int attr_dim, int out_dim,
                            std::uint64_t seed);

/// GraphConv-style model: per layer one linear stage on [self, aggregate],
/// skip connections from the second layer on, mean-pool readout.
MpnnModel init_gc_meanpool(int layers, int hidden, int attr_dim, int out_dim, std::uint64_t seed);

/// Largest singular value by power iteration on A^T A.
double spectral_norm(const Eigen::MatrixXd& a, int max_iters = 100, double tol = 1e-10);

/// Max attribute row norm over the dataset; the attribute-ball radius used
/// for the feature-bound recursion.
double attribute_radius(const Dataset& ds);

}  // namespace didm
