#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "escvs/vec.hpp"

#if defined(__SIZEOF_FLOAT128__) && !defined(ESCVS_NO_FLOAT128)
#define ESCVS_HAS_FLOAT128 1
namespace escvs {
using widest = __float128;
}
#else
namespace escvs {
using widest = long double;
}
#endif

namespace escvs {

// A plant bundles the drift f(qdot), the kinematic map, and the objective.
// The drift is exposed in three precisions: double for integration,
// long double and the widest available type for the finite-difference
// analysis layer, which probes the same black-box dynamics the controller
// sees instead of relying on closed-form derivatives.
class Plant {
public:
    virtual ~Plant() = default;

    virtual std::size_t vel_dim() const = 0; // n generalized velocities
    virtual std::size_t kin_dim() const = 0; // kinematic state length

    virtual void drift(const double* vel, double* out) const = 0;
    virtual void drift_ld(const long double* vel, long double* out) const = 0;
    virtual void drift_w(const widest* vel, widest* out) const = 0;

    // Rate of the kinematic state for a given generalized velocity.
    virtual void kin_rate(const double* kin, const double* vel, double* out) const = 0;

    virtual double objective(const double* kin) const = 0;

    // Indices of the kinematic coordinates the objective reads.
    virtual std::vector<std::size_t> objective_coords() const = 0;

    // Post-step projection (quaternion renormalization); default no-op.
    virtual void normalize_kin(double* kin) const { (void)kin; }
    virtual bool kin_is_quaternion() const { return false; }

    virtual std::vector<std::string> vel_names() const = 0;
    virtual std::vector<std::string> kin_names() const = 0;
};

// Adapter turning a model struct (templated drift + kinematics + objective)
// into a Plant. The model provides:
//   static constexpr std::size_t n, m;
//   template <class T> void drift(const T* vel, T* out) const;
//   void kin_rate(const double* kin, const double* vel, double* out) const;
//   double objective(const double* kin) const;
//   std::vector<std::size_t> objective_coords() const;
//   std::vector<std::string> vel_names() const, kin_names() const;
// and optionally normalize_kin / kin_is_quaternion.
template <class Model>
class PlantModel final : public Plant {
public:
    explicit PlantModel(Model model) : model_(std::move(model)) {}

    std::size_t vel_dim() const override { return Model::n; }
    std::size_t kin_dim() const override { return Model::m; }

    void drift(const double* vel, double* out) const override {
        model_.template drift<double>(vel, out);
    }
    void drift_ld(const long double* vel, long double* out) const override {
        model_.template drift<long double>(vel, out);
    }
    void drift_w(const widest* vel, widest* out) const override {
        model_.template drift<widest>(vel, out);
    }

    void kin_rate(const double* kin, const double* vel, double* out) const override {
        model_.kin_rate(kin, vel, out);
    }

    double objective(const double* kin) const override { return model_.objective(kin); }

    std::vector<std::size_t> objective_coords() const override {
        return model_.objective_coords();
    }

    void normalize_kin(double* kin) const override { model_.normalize_kin(kin); }
    bool kin_is_quaternion() const override { return Model::is_quaternion; }

    std::vector<std::string> vel_names() const override { return model_.vel_names(); }
    std::vector<std::string> kin_names() const override { return model_.kin_names(); }

    const Model& model() const { return model_; }

private:
    Model model_;
};

} // namespace escvs
