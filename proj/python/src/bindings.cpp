#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vlsc/asymptotics.hpp"
#include "vlsc/bounds.hpp"
#include "vlsc/codes.hpp"
#include "vlsc/errors.hpp"
#include "vlsc/source_models.hpp"
#include "vlsc/spectrum.hpp"

namespace py = pybind11;

// Exact counts cross the boundary as Python ints via their decimal text.
namespace pybind11::detail {
template <>
struct type_caster<vlsc::BigInt> {
  PYBIND11_TYPE_CASTER(vlsc::BigInt, const_name("int"));

  bool load(handle src, bool) {
    if (!PyLong_Check(src.ptr())) return false;
    value = vlsc::BigInt(py::str(src).cast<std::string>());
    return true;
  }

  static handle cast(const vlsc::BigInt& v, return_value_policy, handle) {
    const std::string text = vlsc::to_decimal(v);
    return PyLong_FromString(text.c_str(), nullptr, 10);
  }
};
}  // namespace pybind11::detail

namespace {

vlsc::SwitchingSchedule schedule_of(const vlsc::Distribution& first, const vlsc::Distribution& second,
                                    int even_component, int log_base) {
  if (even_component != 1 && even_component != 2) {
    throw vlsc::ValidationError("even_component", "must be 1 or 2");
  }
  vlsc::SwitchingRule rule;
  rule.even_component = static_cast<std::size_t>(even_component - 1);
  rule.log_base = log_base;
  return vlsc::make_schedule(first, second, rule);
}

vlsc::Comparator comparator_of(const std::string& cmp) {
  if (cmp == ">") return vlsc::Comparator::Greater;
  if (cmp == ">=") return vlsc::Comparator::GreaterEqual;
  throw vlsc::ValidationError("cmp", "must be '>' or '>='");
}

vlsc::SlackRule slack_rule_of(double gamma, const std::string& scale) {
  vlsc::SlackRule rule;
  rule.gamma = gamma;
  if (scale == "linear") {
    rule.scale = vlsc::SlackRule::Scale::Linear;
  } else if (scale == "sqrt") {
    rule.scale = vlsc::SlackRule::Scale::Sqrt;
  } else {
    throw vlsc::ValidationError("scale", "must be 'linear' or 'sqrt'");
  }
  return rule;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact finite-blocklength analysis of variable-length source codes with nonvanishing error";

  static py::exception<vlsc::ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<vlsc::ResourceLimitError> resource_error(m, "ResourceLimitError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const vlsc::ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const vlsc::ResourceLimitError& e) {
      py::set_error(resource_error, e.what());
    }
  });

  // source models
  py::class_<vlsc::Distribution>(m, "Distribution")
      .def(py::init(&vlsc::make_distribution), py::arg("probs"), py::arg("base") = 2)
      .def_readonly("probs", &vlsc::Distribution::probs)
      .def_readonly("base", &vlsc::Distribution::base)
      .def_property_readonly("alphabet_size", &vlsc::Distribution::alphabet_size)
      .def("__repr__", [](const vlsc::Distribution& d) {
        std::ostringstream os;
        os << "Distribution(probs=[";
        for (std::size_t i = 0; i < d.probs.size(); ++i) os << (i ? ", " : "") << d.probs[i];
        os << "], base=" << d.base << ")";
        return os.str();
      });

  py::class_<vlsc::SpectrumAtom>(m, "SpectrumAtom")
      .def_readonly("log_prob", &vlsc::SpectrumAtom::log_prob)
      .def_readonly("count", &vlsc::SpectrumAtom::count)
      .def_readonly("mass", &vlsc::SpectrumAtom::mass)
      .def_property_readonly("types", [](const vlsc::SpectrumAtom& a) {
        py::list out;
        for (const auto& t : a.types) out.append(py::make_tuple(t.counts, t.size));
        return out;
      });

  py::class_<vlsc::Spectrum>(m, "Spectrum")
      .def_readonly("n", &vlsc::Spectrum::n)
      .def_readonly("base", &vlsc::Spectrum::base)
      .def_readonly("alphabet_size", &vlsc::Spectrum::alphabet_size)
      .def_readonly("atoms", &vlsc::Spectrum::atoms)
      .def("rate", &vlsc::Spectrum::rate, py::arg("i"))
      .def("rates",
           [](const vlsc::Spectrum& s) {
             std::vector<double> out;
             for (std::size_t i = 0; i < s.atoms.size(); ++i) out.push_back(s.rate(i));
             return out;
           })
      .def("total_mass", &vlsc::Spectrum::total_mass)
      .def("total_count", &vlsc::Spectrum::total_count)
      .def("__len__", [](const vlsc::Spectrum& s) { return s.atoms.size(); });

  const auto limits = [](std::uint64_t max_types) {
    vlsc::SpectrumLimits l;
    l.max_type_classes = max_types;
    return l;
  };
  const std::uint64_t default_max = vlsc::SpectrumLimits{}.max_type_classes;

  m.def(
      "iid_spectrum", [=](const vlsc::Distribution& d, int n, std::uint64_t max_types) {
        return vlsc::iid_spectrum(d, n, limits(max_types));
      },
      py::arg("d"), py::arg("n"), py::arg("max_types") = default_max);
  m.def(
      "mixed_spectrum",
      [=](const vlsc::Distribution& d1, const vlsc::Distribution& d2, double w1, int n, std::uint64_t max_types) {
        return vlsc::mixed_spectrum(d1, d2, w1, n, limits(max_types));
      },
      py::arg("d1"), py::arg("d2"), py::arg("w1"), py::arg("n"), py::arg("max_types") = default_max);
  m.def(
      "switching_spectrum",
      [=](const vlsc::Distribution& first, const vlsc::Distribution& second, int n, int even_component, int log_base,
          std::uint64_t max_types) {
        return vlsc::switching_spectrum(schedule_of(first, second, even_component, log_base), n, limits(max_types));
      },
      py::arg("first"), py::arg("second"), py::arg("n"), py::arg("even_component") = 1, py::arg("log_base") = 2,
      py::arg("max_types") = default_max);
  m.def("sample_sequences", &vlsc::sample_sequences, py::arg("d"), py::arg("n"), py::arg("count"),
        py::arg("seed"));

  // spectrum functionals
  m.def(
      "tail_mass", [](const vlsc::Spectrum& s, double rate, const std::string& cmp) {
        return vlsc::tail_mass(s, rate, comparator_of(cmp));
      },
      py::arg("s"), py::arg("rate"), py::arg("cmp") = ">");
  m.def("smooth_max_entropy", &vlsc::smooth_max_entropy, py::arg("s"), py::arg("gamma"));
  m.def("smooth_max_count", &vlsc::smooth_max_count, py::arg("s"), py::arg("gamma"));
  m.def(
      "restricted_tail_inf",
      [](const vlsc::Spectrum& s, double eps, double rate, const std::string& cmp) {
        const auto r = vlsc::restricted_tail_inf(s, eps, rate, comparator_of(cmp));
        py::dict out;
        out["value"] = r.value;
        out["set_mass"] = r.set_mass;
        out["boundary_split"] =
            r.boundary_split ? py::object(py::make_tuple(r.boundary_split->atom, r.boundary_split->taken))
                             : py::object(py::none());
        return out;
      },
      py::arg("s"), py::arg("eps"), py::arg("rate"), py::arg("cmp") = ">=");
  m.def("finite_n_first_order", &vlsc::finite_n_first_order, py::arg("s"), py::arg("eps"), py::arg("delta"));
  m.def("finite_n_second_order", &vlsc::finite_n_second_order, py::arg("s"), py::arg("eps"), py::arg("delta"),
        py::arg("rate"));

  // codes
  py::class_<vlsc::CodeAssignment>(m, "CodeAssignment")
      .def_readonly("atom", &vlsc::CodeAssignment::atom)
      .def_readonly("count", &vlsc::CodeAssignment::count)
      .def_readonly("length", &vlsc::CodeAssignment::length)
      .def_readonly("mass", &vlsc::CodeAssignment::mass);
  py::class_<vlsc::CodeSpec>(m, "CodeSpec")
      .def_readonly("n", &vlsc::CodeSpec::n)
      .def_readonly("base", &vlsc::CodeSpec::base)
      .def_readonly("decode_set_mass", &vlsc::CodeSpec::decode_set_mass)
      .def_readonly("error_mass", &vlsc::CodeSpec::error_mass)
      .def_readonly("assignments", &vlsc::CodeSpec::assignments)
      .def_readonly("junk_length", &vlsc::CodeSpec::junk_length);
  py::class_<vlsc::TradeoffPoint>(m, "TradeoffPoint")
      .def_readonly("n", &vlsc::TradeoffPoint::n)
      .def_readonly("eta", &vlsc::TradeoffPoint::eta)
      .def_readonly("eps", &vlsc::TradeoffPoint::eps)
      .def_readonly("delta_star", &vlsc::TradeoffPoint::delta_star)
      .def_readonly("M", &vlsc::TradeoffPoint::budget)
      .def_readonly("short_mass", &vlsc::TradeoffPoint::short_mass)
      .def_readonly("error_mass", &vlsc::TradeoffPoint::error_mass)
      .def_readonly("exact", &vlsc::TradeoffPoint::exact);

  m.def("construct_theorem2_code", &vlsc::construct_theorem2_code, py::arg("s"), py::arg("eps"));
  m.def("code_overflow", &vlsc::code_overflow, py::arg("c"), py::arg("eta"));
  m.def(
      "validate_counting_condition",
      [](const vlsc::CodeSpec& c, bool reserve_junk_string) {
        const auto r = vlsc::validate_counting_condition(c, reserve_junk_string);
        return py::make_tuple(r.valid, r.violated_threshold);
      },
      py::arg("c"), py::arg("reserve_junk_string") = false);
  m.def(
      "optimal_tradeoff",
      [](const vlsc::Spectrum& s, double eta, double eps, bool reserve_junk_string) {
        vlsc::TradeoffOptions opts;
        opts.reserve_junk_string = reserve_junk_string;
        return vlsc::optimal_tradeoff(s, eta, eps, opts);
      },
      py::arg("s"), py::arg("eta"), py::arg("eps"), py::arg("reserve_junk_string") = false);
  m.def(
      "optimal_threshold", [](const vlsc::Spectrum& s, double eps, double delta) {
        return vlsc::optimal_threshold(s, eps, delta);
      },
      py::arg("s"), py::arg("eps"), py::arg("delta"));
  m.def(
      "simulate_roundtrip",
      [](const vlsc::Spectrum& s, const vlsc::CodeSpec& c, const std::vector<vlsc::Sequence>& samples, double eta) {
        const auto r = vlsc::simulate_roundtrip(s, c, samples, eta);
        return py::make_tuple(r.error_rate, r.overflow_rate);
      },
      py::arg("s"), py::arg("c"), py::arg("samples"), py::arg("eta"));

  // bounds
  py::class_<vlsc::BoundReport>(m, "BoundReport")
      .def_readonly("n", &vlsc::BoundReport::n)
      .def_readonly("eta", &vlsc::BoundReport::eta)
      .def_readonly("eps", &vlsc::BoundReport::eps)
      .def_readonly("a_n", &vlsc::BoundReport::a_n)
      .def_readonly("upper", &vlsc::BoundReport::upper)
      .def_readonly("lower", &vlsc::BoundReport::lower)
      .def_readonly("exact_code_overflow", &vlsc::BoundReport::exact_code_overflow)
      .def_readonly("exact_optimal", &vlsc::BoundReport::exact_optimal)
      .def("sandwich_holds", &vlsc::BoundReport::sandwich_holds);
  m.def("theorem2_upper", &vlsc::theorem2_upper, py::arg("s"), py::arg("eps"), py::arg("a_n"), py::arg("eta"));
  m.def(
      "theorem3_lower", [](const vlsc::Spectrum& s, double d_mass, double a_n, double eta) {
        return vlsc::theorem3_lower(s, d_mass, a_n, eta);
      },
      py::arg("s"), py::arg("decode_mass_target"), py::arg("a_n"), py::arg("eta"));
  m.def(
      "sandwich_sweep",
      [](const vlsc::Spectrum& s, double eps, const std::vector<double>& etas, double gamma,
         const std::string& scale) { return vlsc::sandwich_sweep(s, eps, etas, slack_rule_of(gamma, scale)); },
      py::arg("s"), py::arg("eps"), py::arg("etas"), py::arg("gamma"), py::arg("scale") = "linear");

  // asymptotics
  m.def("entropy", &vlsc::entropy, py::arg("d"));
  m.def("varentropy", &vlsc::varentropy, py::arg("d"));
  m.def("q_upper", &vlsc::q_upper, py::arg("x"));
  m.def("q_upper_inv", &vlsc::q_upper_inv, py::arg("gamma"));
  m.def("second_order_threshold", &vlsc::second_order_threshold, py::arg("d"), py::arg("eps"), py::arg("delta"),
        py::arg("rate"));
  m.def(
      "mean_length_constants", [](const vlsc::Distribution& d, double eps) {
        const auto c = vlsc::mean_length_constants(d, eps);
        return py::make_tuple(c.r2, c.kpv);
      },
      py::arg("d"), py::arg("eps"));
  m.def("second_order_at_r2", &vlsc::second_order_at_r2, py::arg("d"), py::arg("eps"), py::arg("delta"));

  py::class_<vlsc::Measurement>(m, "Measurement")
      .def_readonly("n", &vlsc::Measurement::n)
      .def_readonly("eta_star", &vlsc::Measurement::eta_star)
      .def_readonly("first_order_gap", &vlsc::Measurement::first_order_gap)
      .def_readonly("second_order_value", &vlsc::Measurement::second_order_value)
      .def_readonly("second_order_gap", &vlsc::Measurement::second_order_gap);
  py::class_<vlsc::AsymptoticReport>(m, "AsymptoticReport")
      .def_readonly("H", &vlsc::AsymptoticReport::H)
      .def_readonly("V", &vlsc::AsymptoticReport::V)
      .def_readonly("R1", &vlsc::AsymptoticReport::R1)
      .def_readonly("R2", &vlsc::AsymptoticReport::R2)
      .def_readonly("L_pred", &vlsc::AsymptoticReport::L_pred)
      .def_readonly("kpv", &vlsc::AsymptoticReport::kpv)
      .def_readonly("measurements", &vlsc::AsymptoticReport::measurements);
  m.def("asymptotic_report", &vlsc::asymptotic_report, py::arg("d"), py::arg("eps"), py::arg("delta"));
  m.def(
      "convergence_study", [](const vlsc::Distribution& d, double eps, double delta, const std::vector<int>& grid) {
        return vlsc::convergence_study(d, eps, delta, grid);
      },
      py::arg("d"), py::arg("eps"), py::arg("delta"), py::arg("n_grid"));

  py::class_<vlsc::OptimisticPoint>(m, "OptimisticPoint")
      .def_readonly("n", &vlsc::OptimisticPoint::n)
      .def_readonly("value", &vlsc::OptimisticPoint::value)
      .def_property_readonly("component", [](const vlsc::OptimisticPoint& p) { return p.component + 1; });
  py::class_<vlsc::OptimisticReport>(m, "OptimisticReport")
      .def_readonly("points", &vlsc::OptimisticReport::points)
      .def_readonly("limsup_estimate", &vlsc::OptimisticReport::limsup_estimate)
      .def_readonly("liminf_estimate", &vlsc::OptimisticReport::liminf_estimate)
      .def_readonly("component_entropy_max", &vlsc::OptimisticReport::component_entropy_max)
      .def_readonly("component_entropy_min", &vlsc::OptimisticReport::component_entropy_min);
  m.def(
      "optimistic_study",
      [](const vlsc::Distribution& first, const vlsc::Distribution& second, double eps, double delta,
         const std::vector<int>& grid, double tail_fraction, int even_component) {
        return vlsc::optimistic_study(schedule_of(first, second, even_component, 2), eps, delta, grid,
                                      tail_fraction);
      },
      py::arg("first"), py::arg("second"), py::arg("eps"), py::arg("delta"), py::arg("n_grid"),
      py::arg("tail_fraction") = 0.5, py::arg("even_component") = 1);
}
