// Copyright 2026 The dpmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dpmarket/crypto.hpp"
#include "dpmarket/error.hpp"
#include "dpmarket/ldp.hpp"
#include "dpmarket/ledger.hpp"
#include "dpmarket/protocol.hpp"
#include "dpmarket/serialize.hpp"
#include "dpmarket/sim.hpp"

namespace py = pybind11;
using namespace dpmarket;

namespace {

ByteView View(const std::string& s) { return AsBytes(s); }
py::bytes ToPyBytes(ByteView b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

py::dict EstimateToDict(const FrequencyEstimate& e) {
  py::dict d;
  d["raw"] = e.raw;
  d["clamped"] = e.clamped;
  d["total"] = e.total;
  d["distribution"] = e.Distribution();
  return d;
}

py::dict AdvantageToDict(const AdvantageRecord& r) {
  py::dict d;
  d["n"] = r.n;
  d["f"] = r.f;
  d["p_guess"] = r.p_guess;
  d["p_posterior"] = r.p_posterior;
  d["advantage"] = r.advantage;
  return d;
}

sim::ExperimentConfig MakeConfig(std::size_t n, std::vector<std::size_t> counts,
                                 double mean, double sd, double f,
                                 std::uint64_t seed) {
  sim::ExperimentConfig c;
  c.n_choices = n;
  c.provider_counts = std::move(counts);
  c.mean = mean;
  c.sd = sd;
  c.coin = CoinBias(f);
  c.seed = seed;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core of the dpmarket privacy-preserving data marketplace";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&]() {
    return py::exception<Error>(m, "Error", PyExc_RuntimeError);
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(ToString(e.code())) + ": " + e.what();
      py::set_error(error_type.get_stored(), msg.c_str());
    }
  });

  // ldp
  m.def("encode_truth",
        [](std::size_t n, std::size_t choice) { return EncodeTruth(n, choice).bits; },
        py::arg("n"), py::arg("choice_index"));
  m.def("randomize",
        [](const std::vector<bool>& truth, double f, std::uint64_t seed) {
          Rng rng(seed);
          return Randomize(ResponseBits{truth}, CoinBias(f), rng).bits;
        },
        py::arg("truth"), py::arg("f"), py::arg("seed"));
  m.def("estimate_counts",
        [](const std::vector<std::int64_t>& observed, std::int64_t total, double f) {
          return EstimateToDict(EstimateCounts(observed, total, CoinBias(f)));
        },
        py::arg("observed_ones"), py::arg("total"), py::arg("f"));
  m.def("attacker_advantage",
        [](std::size_t n, double f) { return AdvantageToDict(AttackerAdvantage(n, CoinBias(f))); },
        py::arg("n"), py::arg("f"));
  m.def("map_guess_success_probability",
        [](std::size_t n, double f) { return MapGuessSuccessProbability(n, CoinBias(f)); },
        py::arg("n"), py::arg("f"));

  // crypto
  m.def("hash", [](const std::string& data) { return ToPyBytes(Hash(View(data)).view()); },
        py::arg("data"), "SHA-256 digest");
  m.def("derive_key",
        [](const std::string& s1, const std::string& s2) {
          return ToPyBytes(DeriveKey(View(s1), View(s2)).view());
        },
        py::arg("s1"), py::arg("s2"));

  // ledger
  py::class_<Contract>(m, "Contract")
      .def_static(
          "deploy",
          [](const std::string& query_digest, const std::string& s2_commitment,
             std::int64_t price, std::int64_t required) {
            return Contract::Deploy(Digest::FromBytes(View(query_digest)),
                                    Digest::FromBytes(View(s2_commitment)), price,
                                    required);
          },
          py::arg("query_digest"), py::arg("s2_commitment"), py::arg("price"),
          py::arg("required_responses"))
      .def("record_response_hash",
           [](Contract& c, const std::string& address, const std::string& digest) {
             c.RecordResponseHash(Address::FromBytes(View(address)),
                                  Digest::FromBytes(View(digest)));
           },
           py::arg("address"), py::arg("digest"))
      .def("record_filter_hash",
           [](Contract& c, const std::string& digest, std::int64_t accepted) {
             c.RecordFilterHash(Digest::FromBytes(View(digest)), accepted);
           },
           py::arg("filter_digest"), py::arg("accepted_count"))
      .def("make_deposit", &Contract::MakeDeposit, py::arg("amount"))
      .def("reveal_and_settle",
           [](Contract& c, const std::string& s2, const std::string& payee) {
             c.RevealAndSettle(Nonce::FromBytes(View(s2)), Address::FromBytes(View(payee)));
           },
           py::arg("s2"), py::arg("payee"))
      .def_property_readonly("phase",
                             [](const Contract& c) { return std::string(ToString(c.phase())); })
      .def_property_readonly("gas_used", &Contract::gas_used)
      .def_property_readonly("deposit_balance", &Contract::deposit_balance)
      .def_property_readonly("transferred_out", &Contract::transferred_out)
      .def("events_jsonl",
           [](const Contract& c) { return EventsToJsonLines(c.events()); })
      .def("gas_report_json",
           [](const Contract& c, std::optional<double> usd_per_gas) {
             std::optional<FiatRate> rate;
             if (usd_per_gas) rate = FiatRate{*usd_per_gas};
             return GasReportToJson(MakeGasReport(c.events(), rate)).dump();
           },
           py::arg("usd_per_gas") = py::none());

  // protocol
  m.def(
      "run_session_json",
      [](std::size_t n, std::int64_t price, std::int64_t required,
         std::size_t providers, double f, std::uint64_t seed,
         const std::string& predicate, bool inject_wrong_reveal, bool inject_tamper) {
        SessionRunConfig config;
        config.terms = MarketTerms{Query::WithIndexLabels(n), price, required, CoinBias(f)};
        config.providers = providers;
        config.seed = seed;
        config.predicate = predicate;
        config.inject_wrong_reveal = inject_wrong_reveal;
        config.inject_tamper = inject_tamper;
        const SessionRunResult result = [&] {
          py::gil_scoped_release release;
          return RunSession(config);
        }();
        std::string failure =
            result.failure ? std::string(ToString(*result.failure)) : std::string();
        return py::make_tuple(TranscriptToJson(result.transcript).dump(), failure);
      },
      py::arg("n"), py::arg("price"), py::arg("required_responses"), py::arg("providers"),
      py::arg("f"), py::arg("seed"), py::arg("predicate") = "all",
      py::arg("inject_wrong_reveal") = false, py::arg("inject_tamper") = false);
  m.def(
      "verify_transcript",
      [](const std::string& transcript_json, const std::string& which) {
        const SessionTranscript t = TranscriptFromJson(Json::parse(transcript_json));
        if (which == "filter") {
          if (!t.filter) throw Error(ErrorCode::kWrongPhase, "no filter in transcript");
          return VerifyFilter(*t.filter, t.contract.events());
        }
        for (const auto& s : t.submissions) {
          if ("response:" + s.address.ToHex() == which) {
            return VerifyResponseIntegrity(s, t.contract.events());
          }
        }
        throw Error(ErrorCode::kMissingRecord, "no submission matches '" + which + "'");
      },
      py::arg("transcript_json"), py::arg("which"));

  // sim
  m.def(
      "accuracy_experiment_json",
      [](std::size_t n, std::vector<std::size_t> counts, double mean, double sd,
         double f, std::uint64_t seed) {
        const auto config = MakeConfig(n, std::move(counts), mean, sd, f, seed);
        const sim::AccuracyReport report = [&] {
          py::gil_scoped_release release;
          return sim::RunAccuracyExperiment(config);
        }();
        return AccuracyReportToJson(report).dump();
      },
      py::arg("n") = 20,
      py::arg("provider_counts") = std::vector<std::size_t>{500, 1000, 5000, 10000},
      py::arg("mean") = 10.0, py::arg("sd") = 2.0, py::arg("f") = 0.5, py::arg("seed") = 1);
  m.def(
      "attacker_experiment_json",
      [](const std::string& mode, std::size_t providers, std::size_t n, double mean,
         double sd, double f, std::uint64_t seed) {
        const auto config = MakeConfig(n, {1}, mean, sd, f, seed);
        return AttackerReportToJson(
                   sim::RunAttackerExperiment(config, sim::ParseAttackMode(mode), providers))
            .dump();
      },
      py::arg("mode"), py::arg("providers") = 1000, py::arg("n") = 20,
      py::arg("mean") = 10.0, py::arg("sd") = 2.0, py::arg("f") = 0.5, py::arg("seed") = 1);
  m.def(
      "advantage_sweep",
      [](const std::vector<std::size_t>& n_values, const std::vector<double>& f_values) {
        py::list rows;
        for (const auto& r : sim::AdvantageSweep(n_values, f_values)) {
          rows.append(AdvantageToDict(r));
        }
        return rows;
      },
      py::arg("n_values"), py::arg("f_values"));
}
