//------------------------------------------------------------------------------
//
//   Copyright 2026 The emoknn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#include "emoknn/explain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>

namespace emoknn {

ClassHistogram class_histogram(std::span<Neighbor const> trace, std::string model)
{
  if (trace.empty())
  {
    throw ValidationError("class histogram of an empty trace");
  }
  ClassHistogram h{std::move(model), static_cast<int>(trace.size()), {}};
  for (auto const &n : trace)
  {
    ++h.counts[static_cast<std::size_t>(n.label.value())];
  }
  return h;
}

std::vector<IntersectionEntry> IntersectionReport::shared(int min_count) const
{
  std::vector<IntersectionEntry> out;
  for (auto const &e : entries)
  {
    if (e.count >= min_count)
    {
      out.push_back(e);
    }
  }
  return out;
}

IntersectionReport neighbor_intersection(std::span<MemberTrace const> traces, TextLookup const &text_of)
{
  std::map<std::string, IntersectionEntry> by_id;
  std::map<std::string, std::size_t>       last_member;
  for (std::size_t m = 0; m < traces.size(); ++m)
  {
    auto const &t = traces[m];
    for (auto const &n : t.neighbors)
    {
      auto &e = by_id[n.train_id];
      if (e.count == 0)
      {
        e.train_id = n.train_id;
        e.label    = n.label.value();
        if (text_of)
        {
          e.text = text_of(n.train_id);
        }
      }
      auto [it, fresh] = last_member.try_emplace(n.train_id, m);
      if (fresh || it->second != m)
      {
        it->second = m;
        e.members.push_back(t.member);
        ++e.count;
      }
    }
  }
  IntersectionReport report;
  report.entries.reserve(by_id.size());
  for (auto &[id, e] : by_id)
  {
    report.entries.push_back(std::move(e));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](auto const &a, auto const &b) { return a.count > b.count; });
  return report;
}

namespace {

using nlohmann::json;

json to_json_value(ExplanationReport const &r)
{
  json members = json::array();
  for (auto const &m : r.members)
  {
    members.push_back({{"name", m.name},
                       {"k", m.k},
                       {"score", m.score},
                       {"histogram", m.histogram.counts}});
  }
  json shared = json::array();
  for (auto const &e : r.intersection.entries)
  {
    shared.push_back({{"train_id", e.train_id},
                      {"count", e.count},
                      {"members", e.members},
                      {"label", e.label},
                      {"text", e.text}});
  }
  json out = {{"instance_id", r.instance_id},
              {"text", r.text},
              {"final_score", r.final_score},
              {"rounded", r.rounded},
              {"members", members},
              {"intersection", shared}};
  out["gold"] = r.gold ? json(*r.gold) : json(nullptr);
  return out;
}

std::string fixed(double v, int decimals = 3)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width, bool right = false)
{
  if (s.size() >= width)
  {
    return s;
  }
  return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string ExplanationReport::to_json() const
{
  return to_json_value(*this).dump(2) + "\n";
}

ExplanationReport ExplanationReport::from_json(std::string_view text)
{
  try
  {
    auto const        j = json::parse(text);
    ExplanationReport r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.text        = j.at("text").get<std::string>();
    r.final_score = j.at("final_score").get<double>();
    r.rounded     = j.at("rounded").get<int>();
    if (!j.at("gold").is_null())
    {
      r.gold = j.at("gold").get<int>();
    }
    for (auto const &m : j.at("members"))
    {
      MemberExplanation me;
      me.name                = m.at("name").get<std::string>();
      me.k                   = m.at("k").get<int>();
      me.score               = m.at("score").get<double>();
      me.histogram.model     = me.name;
      me.histogram.k         = me.k;
      me.histogram.counts    = m.at("histogram").get<std::array<int, 4>>();
      r.members.push_back(std::move(me));
    }
    for (auto const &e : j.at("intersection"))
    {
      IntersectionEntry ie;
      ie.train_id = e.at("train_id").get<std::string>();
      ie.count    = e.at("count").get<int>();
      ie.members  = e.at("members").get<std::vector<std::string>>();
      ie.label    = e.at("label").get<int>();
      ie.text     = e.at("text").get<std::string>();
      r.intersection.entries.push_back(std::move(ie));
    }
    return r;
  }
  catch (json::exception const &e)
  {
    throw ValidationError(std::string("malformed explanation report: ") + e.what());
  }
}

std::string ExplanationReport::to_text() const
{
  std::string out = "Instance " + instance_id + "\n";
  if (!text.empty())
  {
    out += "  \"" + text + "\"\n";
  }
  out += "Final score " + fixed(final_score) + " -> label " + std::to_string(rounded);
  if (gold)
  {
    out += " (gold " + std::to_string(*gold) + (*gold == rounded ? ", correct)" : ", wrong)");
  }
  out += "\n\n";

  std::size_t name_w = 6;
  for (auto const &m : members)
  {
    name_w = std::max(name_w, m.name.size());
  }
  out += pad("Member", name_w) + "    k  score     0   1   2   3\n";
  for (auto const &m : members)
  {
    out += pad(m.name, name_w) + pad(std::to_string(m.k), 5, true) + "  " + fixed(m.score);
    for (int c : m.histogram.counts)
    {
      out += pad(std::to_string(c), 4, true);
    }
    out += "\n";
  }

  auto const shared_entries = intersection.shared(2);
  out += "\nNeighbors shared across members:\n";
  if (shared_entries.empty())
  {
    out += "  no shared neighbors\n";
    return out;
  }
  for (auto const &e : shared_entries)
  {
    out += "  " + e.train_id + "  chosen by " + std::to_string(e.count) + " of " + std::to_string(members.size()) +
           "  class " + std::to_string(e.label) + "  [";
    for (std::size_t i = 0; i < e.members.size(); ++i)
    {
      out += (i ? ", " : "") + e.members[i];
    }
    out += "]";
    if (!e.text.empty())
    {
      out += "  \"" + e.text + "\"";
    }
    out += "\n";
  }
  return out;
}

ExplanationReport render_explanation(EnsemblePrediction const &prediction, std::span<ClassHistogram const> histograms,
                                     IntersectionReport intersection, std::string text, std::optional<int> gold)
{
  if (histograms.size() != prediction.member_scores.size())
  {
    throw ValidationError("got " + std::to_string(histograms.size()) + " histograms for " +
                          std::to_string(prediction.member_scores.size()) + " members");
  }
  ExplanationReport r;
  r.instance_id = prediction.instance_id;
  r.text        = std::move(text);
  r.gold        = gold;
  r.final_score = prediction.final_score;
  r.rounded     = prediction.rounded.value();
  for (std::size_t m = 0; m < histograms.size(); ++m)
  {
    r.members.push_back({histograms[m].model, histograms[m].k, prediction.member_scores[m], histograms[m]});
  }
  r.intersection = std::move(intersection);
  return r;
}

ExplanationReport explain_prediction(EnsemblePrediction const &prediction, std::span<std::string const> member_names,
                                     TextLookup const &text_of, std::string text, std::optional<int> gold)
{
  if (member_names.size() != prediction.traces.size())
  {
    throw ValidationError("member names do not match the prediction's member count");
  }
  std::vector<ClassHistogram> histograms;
  std::vector<MemberTrace>    traces;
  for (std::size_t m = 0; m < member_names.size(); ++m)
  {
    histograms.push_back(class_histogram(prediction.traces[m], member_names[m]));
    traces.push_back({member_names[m], prediction.traces[m]});
  }
  return render_explanation(prediction, histograms, neighbor_intersection(traces, text_of), std::move(text), gold);
}

}  // namespace emoknn
