#pragma once

// Brute-force reference implementations used only by the tests. Nothing here
// includes the engine: tokenization, statistics, scoring, grouping and loss
// are re-derived directly from their defining formulas, favouring obvious
// loops over speed.

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline bool word_char(char ch) {
  unsigned char c = static_cast<unsigned char>(ch);
  return std::isalnum(c) != 0 || c >= 0x80;
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    while (!w.empty() && !word_char(w.front())) w.erase(w.begin());
    while (!w.empty() && !word_char(w.back())) w.pop_back();
    if (w.empty()) continue;
    for (auto& c : w)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    out.push_back(w);
  }
  return out;
}

inline std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t\r\n\f\v");
    if (b != std::string::npos) {
      std::size_t e = cur.find_last_not_of(" \t\r\n\f\v");
      out.push_back(cur.substr(b, e - b + 1));
    }
    cur.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::set<std::string> load_list(const std::string& path) {
  std::set<std::string> words;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto t = tokenize(line);
    if (t.size() == 1) words.insert(t[0]);
  }
  return words;
}

struct RefSentence {
  std::string image_id;
  std::string comment_id;
  std::size_t index = 0;
  std::string raw;
  std::vector<std::string> tokens;
};

struct RefCorpus {
  std::vector<std::string> image_ids;
  std::vector<RefSentence> sentences;  // document order
};

inline RefCorpus load_corpus(const std::string& path) {
  RefCorpus c;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line);
    std::string id = j["image_id"];
    c.image_ids.push_back(id);
    for (const auto& cm : j["comments"]) {
      std::size_t k = 0;
      for (const auto& frag : split(cm["text"].get<std::string>())) {
        auto toks = tokenize(frag);
        if (toks.empty()) continue;
        c.sentences.push_back({id, cm["comment_id"].get<std::string>(), k++, frag, toks});
      }
    }
  }
  return c;
}

inline std::map<std::string, std::pair<double, double>> load_sentiment(const std::string& path) {
  std::map<std::string, std::pair<double, double>> m;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    m[j["text"].get<std::string>()] = {j["positive"].get<double>(), j["negative"].get<double>()};
  }
  return m;
}

inline double beta(double x, double m, double sigma) { return 1.0 / (1.0 + std::exp(-((x - m) / sigma))); }

struct RefArs {
  double a = 0, l = 0, o = 0, s = 0, tfidf = 0, total = 0;
};

/// Every formula evaluated from scratch for every sentence.
inline std::vector<RefArs> score_corpus(const RefCorpus& c, const std::set<std::string>& aw,
                                        const std::set<std::string>& ow,
                                        const std::map<std::string, std::pair<double, double>>& sent) {
  // Length statistics over all sentences.
  double sum = 0;
  double mn = 1e300, mx = -1e300;
  for (const auto& s : c.sentences) {
    double len = static_cast<double>(s.tokens.size());
    sum += len;
    mn = std::min(mn, len);
    mx = std::max(mx, len);
  }
  const double n_sent = static_cast<double>(c.sentences.size());
  const double m_len = sum / n_sent;
  double sq = 0;
  for (const auto& s : c.sentences) sq += std::pow(static_cast<double>(s.tokens.size()) - m_len, 2);
  const double sd_len = std::sqrt(sq / n_sent);

  // Documents: every token of every sentence of one image.
  std::map<std::string, std::vector<std::string>> doc;
  for (const auto& id : c.image_ids) doc[id];
  for (const auto& s : c.sentences)
    for (const auto& t : s.tokens) doc[s.image_id].push_back(t);
  const double N = static_cast<double>(c.image_ids.size());

  auto tau = [&](const std::string& term, const std::string& image) {
    const auto& d = doc.at(image);
    double n_tm = 0;
    for (const auto& t : d) n_tm += (t == term) ? 1 : 0;
    if (n_tm == 0) return 0.0;
    double I = 0;
    for (const auto& [id, other] : doc) {
      bool has = false;
      for (const auto& t : other) has = has || t == term;
      I += has ? 1 : 0;
    }
    return n_tm / static_cast<double>(d.size()) * (std::log((1 + N) / (1 + I)) + 1);
  };

  // Population of tau: one value per distinct (term, image).
  std::vector<double> taus;
  for (const auto& [id, d] : doc) {
    std::set<std::string> distinct(d.begin(), d.end());
    for (const auto& term : distinct) taus.push_back(tau(term, id));
  }
  double tsum = 0, tmin = 1e300, tmax = -1e300;
  for (double v : taus) {
    tsum += v;
    tmin = std::min(tmin, v);
    tmax = std::max(tmax, v);
  }
  const double m_tau = tsum / static_cast<double>(taus.size());
  double tsq = 0;
  for (double v : taus) tsq += (v - m_tau) * (v - m_tau);
  const double sd_tau = std::sqrt(tsq / static_cast<double>(taus.size()));

  std::vector<RefArs> out;
  for (const auto& s : c.sentences) {
    RefArs r;
    for (const auto& t : s.tokens) {
      r.a += aw.count(t) ? 1 : 0;
      r.o += ow.count(t) ? 1 : 0;
    }
    const double len = static_cast<double>(s.tokens.size());
    r.l = (beta(len, m_len, sd_len) - beta(mn, m_len, sd_len)) /
          (beta(mx, m_len, sd_len) - beta(mn, m_len, sd_len));
    auto p = sent.at(s.raw);
    r.s = (p.first + p.second) / 2;
    for (const auto& t : s.tokens) {
      double v = std::min(std::max(tau(t, s.image_id), tmin), tmax);
      r.tfidf += (beta(v, m_tau, sd_tau) - beta(tmin, m_tau, sd_tau)) /
                 (beta(tmax, m_tau, sd_tau) - beta(tmin, m_tau, sd_tau));
    }
    r.total = r.a + r.l + r.o + r.s + r.tfidf;
    out.push_back(r);
  }
  return out;
}

// ---- caption selection ----

struct RefCandidate {
  std::string text;
  double confidence = 0;
  std::vector<double> emb;
  double ars = 0;
  double relevance = 0;
};

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / (std::sqrt(na) * std::sqrt(nb));
}

struct RefPick {
  std::size_t index;  // into the original candidate list
  std::size_t group_size;
};

/// filter -> group (leader or transitive closure) -> floor -> argmax -> order.
/// `use_relevance` picks representatives and orders by relevance instead of ARS.
inline std::vector<RefPick> select(const std::vector<RefCandidate>& all,
                                   const std::set<std::string>& blacklist, double threshold,
                                   double floor, bool components, bool use_relevance = false) {
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (!blacklist.count(all[i].text)) alive.push_back(i);

  // Processing order by repeated selection of the best remaining candidate.
  std::vector<std::size_t> order;
  std::vector<bool> taken(alive.size(), false);
  for (std::size_t step = 0; step < alive.size(); ++step) {
    std::size_t best = alive.size();
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (taken[k]) continue;
      if (best == alive.size() || all[alive[k]].confidence > all[alive[best]].confidence) best = k;
    }
    taken[best] = true;
    order.push_back(alive[best]);
  }

  std::vector<std::vector<std::size_t>> groups;
  if (!components) {
    for (auto i : order) {
      bool placed = false;
      for (auto& g : groups) {
        if (cos_sim(all[g[0]].emb, all[i].emb) > threshold) {
          g.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({i});
    }
  } else {
    // Reachability matrix closed by Floyd-Warshall.
    const std::size_t n = order.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        reach[a][b] = a == b || cos_sim(all[order[a]].emb, all[order[b]].emb) > threshold;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (reach[a][k] && reach[k][b]) reach[a][b] = true;
    std::vector<bool> used(n, false);
    for (std::size_t a = 0; a < n; ++a) {
      if (used[a]) continue;
      std::vector<std::size_t> g;
      for (std::size_t b = 0; b < n; ++b) {
        if (!used[b] && reach[a][b]) {
          used[b] = true;
          g.push_back(order[b]);
        }
      }
      groups.push_back(g);
    }
  }

  struct Out {
    std::size_t index, size;
    double key;
    double conf;
  };
  std::vector<Out> picks;
  for (const auto& g : groups) {
    double s = 0;
    for (auto i : g) s += all[i].ars;
    if (s / static_cast<double>(g.size()) < floor) continue;
    std::size_t best = g[0];
    for (auto i : g) {
      double vi = use_relevance ? all[i].relevance : all[i].ars;
      double vb = use_relevance ? all[best].relevance : all[best].ars;
      if (vi > vb) best = i;  // g is in confidence order, so the first max wins ties
    }
    picks.push_back({best, g.size(), use_relevance ? all[best].relevance : all[best].ars,
                     all[best].confidence});
  }
  // Insertion sort: key desc, confidence desc, index asc.
  for (std::size_t i = 1; i < picks.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      const auto& a = picks[j - 1];
      const auto& b = picks[j];
      bool swap = b.key > a.key || (b.key == a.key && b.conf > a.conf) ||
                  (b.key == a.key && b.conf == a.conf && b.index < a.index);
      if (!swap) break;
      std::swap(picks[j - 1], picks[j]);
    }
  }
  std::vector<RefPick> out;
  for (const auto& p : picks) out.push_back({p.index, p.size});
  return out;
}

// ---- loss ----

inline double weighted_loss(const std::vector<double>& weights,
                            const std::vector<std::vector<double>>& log_probs) {
  double total = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double s = 0;
    for (double lp : log_probs[k]) s += lp;
    total += -weights[k] * s;
  }
  return total;
}

}  // namespace oracle
