#include <sstream>

#include "fprw/factors.hpp"

namespace fprw {

GreenModelPtr make_lattice_model(const LatticeSpec& spec);
GreenModelPtr make_finite_model(const FiniteGroupSpec& spec);
GreenModelPtr make_tree_model(const HomTreeSpec& spec);
GreenModelPtr make_explicit_model(const ExplicitSpec& spec);

GreenModelPtr make_model(const FactorSpec& spec) {
    struct Visitor {
        GreenModelPtr operator()(const LatticeSpec& s) const { return make_lattice_model(s); }
        GreenModelPtr operator()(const FiniteGroupSpec& s) const { return make_finite_model(s); }
        GreenModelPtr operator()(const HomTreeSpec& s) const { return make_tree_model(s); }
        GreenModelPtr operator()(const ExplicitSpec& s) const { return make_explicit_model(s); }
    };
    return std::visit(Visitor{}, spec);
}

std::string describe(const FactorSpec& spec) {
    std::ostringstream os;
    if (const auto* l = std::get_if<LatticeSpec>(&spec)) {
        os << "Z^" << l->dim();
    } else if (const auto* f = std::get_if<FiniteGroupSpec>(&spec)) {
        os << "G" << f->order();
    } else if (const auto* t = std::get_if<HomTreeSpec>(&spec)) {
        os << "T" << t->q;
    } else {
        os << "explicit";
    }
    return os.str();
}

GreenAnalytics analyze_model(GreenModelPtr model, std::size_t N) {
    GreenAnalytics a;
    a.radius = model->radius();
    a.g_at_r = model->g_at_radius();
    a.gprime_at_r = a.g_at_r.is_finite() ? model->gprime_at_radius() : ExtReal::infinity();
    a.theta = model->theta();
    a.period = model->period();
    a.sing = model->singularity();
    a.series = model->series(N);
    a.model = std::move(model);
    return a;
}

GreenAnalytics analyze_factor(const FactorSpec& spec, std::size_t N) { return analyze_model(make_model(spec), N); }

}  // namespace fprw
