#include "eltl/formula.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace eltl {

const char* const kTrueAnchorProp = "p0";

namespace detail {

struct node_key {
  op kind;
  agent_id agent;
  const std::string* prop;
  const node* lhs;
  const node* rhs;
};

struct node_key_hash {
  size_t operator()(const node_key& k) const {
    size_t h = std::hash<int>()(static_cast<int>(k.kind));
    h = h * 1315423911u + std::hash<int>()(k.agent);
    if (k.prop) h = h * 1315423911u + std::hash<std::string>()(*k.prop);
    h = h * 1315423911u + std::hash<const void*>()(k.lhs);
    h = h * 1315423911u + std::hash<const void*>()(k.rhs);
    return h;
  }
};

struct node_key_eq {
  bool operator()(const node_key& a, const node_key& b) const {
    return a.kind == b.kind && a.agent == b.agent && a.lhs == b.lhs &&
           a.rhs == b.rhs &&
           (a.prop == b.prop || (a.prop && b.prop && *a.prop == *b.prop));
  }
};

namespace {
std::mutex g_pool_mutex;
std::unordered_map<node_key, const node*, node_key_hash, node_key_eq>* g_pool;
std::vector<node*>* g_nodes;
}  // namespace

const node* intern(node&& n) {
  std::lock_guard<std::mutex> lock(g_pool_mutex);
  if (!g_pool) {
    g_pool = new std::unordered_map<node_key, const node*, node_key_hash,
                                    node_key_eq>();
    g_nodes = new std::vector<node*>();
  }
  node_key key{n.kind, n.agent, n.kind == op::prop ? &n.prop : nullptr, n.lhs,
               n.rhs};
  auto it = g_pool->find(key);
  if (it != g_pool->end()) return it->second;
  node* stored = new node(std::move(n));
  stored->id = static_cast<uint32_t>(g_nodes->size());
  stored->size = 1 + (stored->lhs ? stored->lhs->size : 0) +
                 (stored->rhs ? stored->rhs->size : 0);
  g_nodes->push_back(stored);
  node_key skey{stored->kind, stored->agent,
                stored->kind == op::prop ? &stored->prop : nullptr, stored->lhs,
                stored->rhs};
  (*g_pool)[skey] = stored;
  return stored;
}

}  // namespace detail

int formula::compare(const formula& o) const {
  if (n_ == o.n_) return 0;
  if (n_->size != o.n_->size) return n_->size < o.n_->size ? -1 : 1;
  if (n_->kind != o.n_->kind)
    return static_cast<int>(n_->kind) < static_cast<int>(o.n_->kind) ? -1 : 1;
  if (n_->kind == op::prop)
    return n_->prop < o.n_->prop ? -1 : (n_->prop > o.n_->prop ? 1 : 0);
  if (n_->agent != o.n_->agent) return n_->agent < o.n_->agent ? -1 : 1;
  if (n_->lhs != o.n_->lhs) {
    int c = formula(n_->lhs).compare(formula(o.n_->lhs));
    if (c != 0) return c;
  }
  if (n_->rhs != o.n_->rhs) {
    if (!n_->rhs) return -1;
    if (!o.n_->rhs) return 1;
    return formula(n_->rhs).compare(formula(o.n_->rhs));
  }
  return 0;
}

formula make_prop(const std::string& name) {
  if (name.empty()) throw error("empty proposition name");
  detail::node n;
  n.kind = op::prop;
  n.prop = name;
  return formula(detail::intern(std::move(n)));
}

static formula mk1(op kind, formula a, agent_id agent = 0) {
  detail::node n;
  n.kind = kind;
  n.agent = agent;
  n.lhs = a.raw();
  return formula(detail::intern(std::move(n)));
}

static formula mk2(op kind, formula a, formula b) {
  detail::node n;
  n.kind = kind;
  n.lhs = a.raw();
  n.rhs = b.raw();
  return formula(detail::intern(std::move(n)));
}

formula make_not(formula f) { return mk1(op::not_, f); }
formula make_and(formula a, formula b) { return mk2(op::and_, a, b); }
formula make_next(formula f) { return mk1(op::next, f); }
formula make_until(formula a, formula b) { return mk2(op::until, a, b); }
formula make_know(agent_id i, formula f) {
  if (i < 0) throw error("agent index must be at least 1");
  return mk1(op::know, f, i);
}
formula make_everyone(formula f) { return mk1(op::everyone, f); }
formula make_common(formula f) { return mk1(op::common, f); }

formula make_false() {
  formula p = make_prop(kTrueAnchorProp);
  return make_and(p, make_not(p));
}
formula make_true() { return make_not(make_false()); }
formula make_or(formula a, formula b) {
  return make_not(make_and(make_not(a), make_not(b)));
}
formula make_implies(formula a, formula b) { return make_or(make_not(a), b); }
formula make_iff(formula a, formula b) {
  return make_and(make_implies(a, b), make_implies(b, a));
}
formula make_eventually(formula f) { return make_until(make_true(), f); }
formula make_always(formula f) {
  return make_not(make_eventually(make_not(f)));
}
formula make_possible(agent_id i, formula f) {
  return make_not(make_know(i, make_not(f)));
}
formula make_everyone_k(int k, formula f) {
  if (k < 1) throw error("E^k requires k >= 1");
  formula g = f;
  for (int j = 0; j < k; ++j) g = make_everyone(g);
  return g;
}
formula make_know_seq(const std::vector<agent_id>& sigma, formula f) {
  formula g = f;
  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it)
    g = make_know(*it, g);
  return g;
}

bool is_false(formula f) { return f == make_false(); }
bool is_true(formula f) { return f == make_true(); }

std::optional<std::pair<formula, formula>> as_or(formula f) {
  // ~(~a & ~b)
  if (f.kind() != op::not_) return std::nullopt;
  formula g = f.lhs();
  if (g.kind() != op::and_) return std::nullopt;
  if (g.lhs().kind() != op::not_ || g.rhs().kind() != op::not_)
    return std::nullopt;
  return std::make_pair(g.lhs().lhs(), g.rhs().lhs());
}

std::optional<std::pair<formula, formula>> as_implies(formula f) {
  auto o = as_or(f);
  if (!o || o->first.kind() != op::not_) return std::nullopt;
  return std::make_pair(o->first.lhs(), o->second);
}

std::optional<formula> as_eventually(formula f) {
  if (f.kind() == op::until && is_true(f.lhs())) return f.rhs();
  return std::nullopt;
}

std::optional<formula> as_always(formula f) {
  // ~(true U ~g)
  if (f.kind() != op::not_) return std::nullopt;
  auto ev = as_eventually(f.lhs());
  if (ev && ev->kind() == op::not_) return ev->lhs();
  return std::nullopt;
}

std::optional<std::pair<agent_id, formula>> as_possible(formula f) {
  if (f.kind() != op::not_) return std::nullopt;
  formula g = f.lhs();
  if (g.kind() != op::know || g.lhs().kind() != op::not_) return std::nullopt;
  return std::make_pair(g.agent(), g.lhs().lhs());
}

// ---------------------------------------------------------------------------
// Printing.  Precedence: unary (0) > U (1) > & (2) > | (3) > -> (4).

namespace {

std::string render(formula f, int ctx) {
  auto wrap = [&](int own, const std::string& body) {
    return own > ctx ? "(" + body + ")" : body;
  };
  if (is_true(f)) return "true";
  if (is_false(f)) return "false";
  if (auto g = as_always(f)) return wrap(0, "G " + render(*g, 0));
  if (auto g = as_eventually(f)) return wrap(0, "F " + render(*g, 0));
  if (auto li = as_possible(f))
    return wrap(0, "L" + std::to_string(li->first) + " " +
                       render(li->second, 0));
  if (auto im = as_implies(f))
    return wrap(4, render(im->first, 3) + " -> " + render(im->second, 4));
  if (auto o = as_or(f))
    return wrap(3, render(o->first, 3) + " | " + render(o->second, 2));
  switch (f.kind()) {
    case op::prop:
      return f.prop_name();
    case op::not_:
      return wrap(0, "~" + render(f.lhs(), 0));
    case op::and_:
      return wrap(2, render(f.lhs(), 2) + " & " + render(f.rhs(), 1));
    case op::next:
      return wrap(0, "X " + render(f.lhs(), 0));
    case op::until:
      return wrap(1, render(f.lhs(), 0) + " U " + render(f.rhs(), 1));
    case op::know:
      return wrap(0, "K" + std::to_string(f.agent()) + " " +
                         render(f.lhs(), 0));
    case op::everyone:
      return wrap(0, "E " + render(f.lhs(), 0));
    case op::common:
      return wrap(0, "C " + render(f.lhs(), 0));
  }
  throw error("unreachable formula kind");
}

}  // namespace

std::string to_string(formula f) {
  if (!f.valid()) return "<null>";
  return render(f, 9);
}

// ---------------------------------------------------------------------------
// Parser.  Recursive descent over the grammar in the module interface.
// `|` and `&` associate to the left, `->` and `U` to the right.

namespace {

struct parser {
  const std::string& s;
  size_t pos = 0;

  explicit parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw error("syntax error at position " + std::to_string(pos) + ": " +
                msg);
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_str(const char* w) {
    skip_ws();
    size_t n = std::string(w).size();
    if (s.compare(pos, n, w) == 0) {
      pos += n;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  formula parse_formula() {
    formula f = parse_implies();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return f;
  }

  formula parse_implies() {
    formula a = parse_or();
    skip_ws();
    if (eat_str("->")) return make_implies(a, parse_implies());
    return a;
  }

  formula parse_or() {
    formula a = parse_and();
    while (true) {
      skip_ws();
      if (pos < s.size() && s[pos] == '|') {
        ++pos;
        a = make_or(a, parse_and());
      } else {
        return a;
      }
    }
  }

  formula parse_and() {
    formula a = parse_until();
    while (true) {
      skip_ws();
      if (pos < s.size() && s[pos] == '&') {
        ++pos;
        a = make_and(a, parse_until());
      } else {
        return a;
      }
    }
  }

  formula parse_until() {
    formula a = parse_unary();
    skip_ws();
    if (pos < s.size() && s[pos] == 'U' && !is_ident_char(pos + 1)) {
      ++pos;
      return make_until(a, parse_until());
    }
    return a;
  }

  bool is_ident_char(size_t p) {
    return p < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_');
  }

  int parse_agent_index() {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos == start) fail("expected agent index");
    int i = std::stoi(s.substr(start, pos - start));
    if (i < 1) {
      pos = start;
      fail("agent index must be at least 1");
    }
    return i;
  }

  formula parse_unary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      formula f = parse_implies();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (c == '~') {
      ++pos;
      return make_not(parse_unary());
    }
    // Keyword-like unary operators: K<i>, L<i>, E, C, X, F, G, true, false.
    if ((c == 'K' || c == 'L') && pos + 1 < s.size() &&
        std::isdigit(static_cast<unsigned char>(s[pos + 1]))) {
      ++pos;
      int i = parse_agent_index();
      formula f = parse_unary();
      return c == 'K' ? make_know(i, f) : make_possible(i, f);
    }
    if ((c == 'E' || c == 'C' || c == 'X' || c == 'F' || c == 'G') &&
        !is_ident_char(pos + 1)) {
      ++pos;
      formula f = parse_unary();
      switch (c) {
        case 'E':
          return make_everyone(f);
        case 'C':
          return make_common(f);
        case 'X':
          return make_next(f);
        case 'F':
          return make_eventually(f);
        default:
          return make_always(f);
      }
    }
    if (eat_str("true")) return make_true();
    if (eat_str("false")) return make_false();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (is_ident_char(pos)) ++pos;
      return make_prop(s.substr(start, pos - start));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

formula parse(const std::string& text) {
  parser p(text);
  return p.parse_formula();
}

// ---------------------------------------------------------------------------

namespace {
template <typename F>
void visit(formula f, F&& fn) {
  fn(f);
  switch (f.kind()) {
    case op::prop:
      return;
    case op::and_:
    case op::until:
      visit(f.lhs(), fn);
      visit(f.rhs(), fn);
      return;
    default:
      visit(f.lhs(), fn);
      return;
  }
}
}  // namespace

std::vector<std::string> props_of(formula f) {
  std::set<std::string> out;
  visit(f, [&](formula g) {
    if (g.kind() == op::prop) out.insert(g.prop_name());
  });
  return {out.begin(), out.end()};
}

agent_id max_agent(formula f) {
  agent_id m = 0;
  visit(f, [&](formula g) {
    if (g.kind() == op::know) m = std::max(m, g.agent());
  });
  return m;
}

bool mentions_common_or_everyone(formula f) {
  bool found = false;
  visit(f, [&](formula g) {
    if (g.kind() == op::common || g.kind() == op::everyone) found = true;
  });
  return found;
}

namespace {
// Longest absorbed agent sequence along any branch, `last` being the agent
// of the innermost enclosing K (0 if none).
int alt(formula f, agent_id last) {
  switch (f.kind()) {
    case op::prop:
      return 0;
    case op::know:
      if (f.agent() == last) return alt(f.lhs(), last);
      return 1 + alt(f.lhs(), f.agent());
    case op::and_:
    case op::until:
      return std::max(alt(f.lhs(), last), alt(f.rhs(), last));
    case op::everyone:
    case op::common:
      throw error("alternation depth is undefined for formulas with E or C");
    default:
      return alt(f.lhs(), last);
  }
}
}  // namespace

int alternation_depth(formula f) {
  if (mentions_common_or_everyone(f))
    throw error("alternation depth is undefined for formulas with E or C");
  return alt(f, 0);
}

std::vector<formula> subformulas(formula f) {
  std::set<formula> seen;
  std::vector<formula> out;
  visit(f, [&](formula g) {
    if (seen.insert(g).second) out.push_back(g);
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace eltl
