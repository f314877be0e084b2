#include <geoweyl/tensor.hpp>

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace geoweyl {

namespace {

std::string slot_name(const Slot& s, const NameTable& names) {
  std::string n;
  switch (s.bind) {
    case Bind::Free: {
      auto it = names.free_names.find(s.id);
      n = it != names.free_names.end() ? it->second : "f" + std::to_string(s.id);
      break;
    }
    case Bind::Dummy: n = "d" + std::to_string(s.id); break;
    case Bind::Vec: {
      auto it = names.vec_names.find(s.id);
      n = it != names.vec_names.end() ? it->second : "u" + std::to_string(s.id);
      break;
    }
    case Bind::Mom: n = "p"; break;
    case Bind::PAux: n = "p" + std::to_string(s.id); break;
  }
  if (s.primed) n += "'";
  return n;
}

std::string slot_text(const Slot& s, const NameTable& names) {
  return (s.up ? std::string("^") : std::string("_")) + slot_name(s, names);
}

std::string head_name(const Factor& f, const NameTable& names) {
  switch (f.head) {
    case Head::Riemann: return "R";
    case Head::Ricci: return "Ric";
    case Head::Metric: return "g";
    case Head::Sigma: return "sig";
    case Head::Atom: {
      auto it = names.atom_names.find(f.atom);
      return it != names.atom_names.end() ? it->second : "atom" + std::to_string(f.atom);
    }
  }
  return "?";
}

std::string factor_text(const Factor& f, const NameTable& names) {
  std::string s = head_name(f, names) + "{";
  bool first = true;
  for (const auto& sl : f.prin) {
    if (!first) s += ",";
    s += slot_text(sl, names);
    first = false;
  }
  if (!f.tail.empty()) {
    s += ";";
    first = true;
    for (const auto& sl : f.tail) {
      if (!first) s += ",";
      s += slot_text(sl, names);
      first = false;
    }
  }
  if (!f.vert.empty()) {
    s += "|";
    first = true;
    for (const auto& sl : f.vert) {
      if (!first) s += ",";
      s += slot_text(sl, names);
      first = false;
    }
  }
  return s + "}";
}

// is this Ricci factor the scalar curvature (self-contracted)?
bool is_scalar_curv(const Factor& f) {
  return f.head == Head::Ricci && f.prin[0].bind == Bind::Dummy &&
         f.prin[1].bind == Bind::Dummy && f.prin[0].id == f.prin[1].id;
}

}  // namespace

std::string to_text(const Poly& p, const NameTable& names) {
  if (p.ts.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.ts.size(); ++i) {
    const Term& t = p.ts[i];
    if (i) os << " + ";
    os << "(" << t.c << ")";
    if (t.hbar) os << "*hb^" << t.hbar;
    for (const auto& f : t.fs) os << "*" << factor_text(f, names);
  }
  return os.str();
}

namespace {

std::string latex_indices(const std::vector<Slot>& v, const NameTable& names, bool lower_block) {
  // renders a run of slots as ^{..} / _{..} blocks in order
  std::string out;
  std::size_t i = 0;
  while (i < v.size()) {
    bool up = v[i].up;
    std::string blk;
    while (i < v.size() && v[i].up == up) {
      blk += slot_name(v[i], names) + " ";
      ++i;
    }
    if (!blk.empty()) blk.pop_back();
    out += (up ? "^{" : "_{") + blk + "}";
  }
  (void)lower_block;
  return out;
}

std::string rat_latex(const Rat& r) {
  using boost::multiprecision::cpp_int;
  cpp_int num = numerator(r), den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string core = den == 1 ? num.str() : "\\tfrac{" + num.str() + "}{" + den.str() + "}";
  return (neg ? "-" : "") + core;
}

std::string coeff_latex(const GQ& c) {
  if (c.im == 0) return rat_latex(c.re);
  if (c.re == 0) {
    if (c.im == 1) return "i";
    if (c.im == -1) return "-i";
    return rat_latex(c.im) + " i";
  }
  return "(" + rat_latex(c.re) + (c.im > 0 ? "+" : "") + rat_latex(c.im) + " i)";
}

}  // namespace

std::string to_latex(const Poly& p, const NameTable& names) {
  if (p.ts.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.ts.size(); ++i) {
    const Term& t = p.ts[i];
    std::string c = coeff_latex(t.c);
    if (i) {
      os << (c.size() && c[0] == '-' ? " " : " + ");
    }
    os << c << " ";
    if (t.hbar) os << "\\hbar^{" << t.hbar << "} ";
    for (const auto& f : t.fs) {
      if (is_scalar_curv(f) && f.tail.empty()) {
        os << "R ";
        continue;
      }
      switch (f.head) {
        case Head::Riemann: os << "R"; break;
        case Head::Ricci: os << "R"; break;  // 2-index R per the usual layout
        case Head::Metric: os << "g"; break;
        case Head::Sigma: os << "\\sigma"; break;
        case Head::Atom: os << head_name(f, names); break;
      }
      std::vector<Slot> run = f.prin;
      if (f.head == Head::Sigma) run = {};
      os << latex_indices(run, names, true);
      if (!f.tail.empty() || f.head == Head::Sigma) {
        std::vector<Slot> tl = f.tail;
        if (f.head == Head::Sigma) {
          os << latex_indices(tl, names, true);
        } else if (f.head == Head::Atom) {
          os << latex_indices(tl, names, true);
        } else if (!tl.empty()) {
          std::string blk;
          for (const auto& sl : tl) blk += slot_name(sl, names) + " ";
          blk.pop_back();
          os << "_{;" << blk << "}";
        }
      }
      if (!f.vert.empty()) os << latex_indices(f.vert, names, false);
      os << " ";
    }
  }
  std::string s = os.str();
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string to_json(const Poly& p, const NameTable& names) {
  using json = nlohmann::ordered_json;
  json doc;
  std::set<std::int32_t> frees;
  for (const auto& t : p.ts)
    for (const auto& f : t.fs)
      for (const auto* arr : {&f.prin, &f.tail, &f.vert})
        for (const auto& s : *arr)
          if (s.bind == Bind::Free) frees.insert(s.id);
  doc["free_signature"] = json::array();
  for (auto id : frees) doc["free_signature"].push_back(slot_name(free_lo(id), names));
  doc["terms"] = json::array();
  for (const auto& t : p.ts) {
    json jt;
    jt["coeff"] = {{"re", to_string(t.c.re)}, {"im", to_string(t.c.im)}};
    jt["hbar"] = t.hbar;
    jt["factors"] = json::array();
    for (const auto& f : t.fs) {
      json jf;
      jf["head"] = head_name(f, names);
      auto slots = [&](const std::vector<Slot>& v) {
        json a = json::array();
        for (const auto& s : v) {
          json js;
          js["bind"] = (int)s.bind;
          js["name"] = slot_name(s, names);
          js["up"] = s.up;
          js["primed"] = s.primed;
          a.push_back(js);
        }
        return a;
      };
      jf["prin"] = slots(f.prin);
      jf["tail"] = slots(f.tail);
      jf["vert"] = slots(f.vert);
      jt["factors"].push_back(jf);
    }
    doc["terms"].push_back(jt);
  }
  return doc.dump(2);
}

}  // namespace geoweyl
