#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mpst/frontend/parser.hpp"
#include "mpst/logic/presburger.hpp"
#include "mpst/runtime/value.hpp"

namespace mpst::runtime {

enum class Action { Send, Receive, Select, Branch, RecCall, End };

inline const char* to_string(Action a) {
  switch (a) {
    case Action::Send: return "send";
    case Action::Receive: return "receive";
    case Action::Select: return "select";
    case Action::Branch: return "branch";
    case Action::RecCall: return "recCall";
    case Action::End: return "end";
  }
  return "?";
}

struct TraceEvent {
  std::size_t step = 0;
  std::string participant;
  Action action = Action::End;
  std::string channel;  // session channel, "-" for recCall/end
  std::string payload;  // value, label, call or "-"
  std::string wire;     // serialized form on the channel, empty when nothing was transmitted

  std::string render() const {
    return std::to_string(step) + " " + participant + " " + to_string(action) + " " + channel + " " + payload;
  }
};

using Store = std::map<std::string, Value>;

struct Trace {
  std::vector<TraceEvent> events;
  std::map<std::string, Store> stores;  // final store per participant
};

struct Scheduler {
  enum class Kind { RoundRobin, Seeded } kind = Kind::RoundRobin;
  std::uint64_t seed = 0;

  static Scheduler round_robin() { return {}; }
  static Scheduler seeded(std::uint64_t s) { return {Kind::Seeded, s}; }
};

struct SimulationOptions {
  bool monitor_assertions = false;
  Scheduler scheduler;
  std::size_t max_steps = 1'000'000;
  SolverOptions solver;
};

namespace detail {

template <class Op>
inline std::int64_t checked(Op op, std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (op(a, b, &out)) throw Error(ErrorKind::Session, "integer overflow at runtime");
  return out;
}
inline bool add_overflow(std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_add_overflow(a, b, r); }
inline bool sub_overflow(std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_sub_overflow(a, b, r); }
inline bool mul_overflow(std::int64_t a, std::int64_t b, std::int64_t* r) { return __builtin_mul_overflow(a, b, r); }

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw Error(ErrorKind::Session, "division by zero at runtime");
  if (a == INT64_MIN && b == -1) throw Error(ErrorKind::Session, "integer overflow at runtime");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Value eval(const ExprPtr& e, const Store& store) {
  return std::visit(
      [&](const auto& n) -> Value {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Expr::Int>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, Expr::Bool>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, Expr::Str>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, Expr::Var>) {
          auto it = store.find(n.name);
          if (it == store.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable '" + n.name + "' at runtime", e->pos);
          return it->second;
        } else if constexpr (std::is_same_v<N, Expr::Unary>) {
          Value v = eval(n.operand, store);
          if (n.op == UnaryOp::Not) return !std::get<bool>(v);
          return checked(sub_overflow, 0, std::get<std::int64_t>(v));
        } else {
          Value a = eval(n.lhs, store);
          if (n.op == BinaryOp::And) return std::get<bool>(a) && std::get<bool>(eval(n.rhs, store));
          if (n.op == BinaryOp::Or) return std::get<bool>(a) || std::get<bool>(eval(n.rhs, store));
          Value b = eval(n.rhs, store);
          if (n.op == BinaryOp::Eq) return a == b;
          if (n.op == BinaryOp::Ne) return a != b;
          std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
          switch (n.op) {
            case BinaryOp::Add: return checked(add_overflow, x, y);
            case BinaryOp::Sub: return checked(sub_overflow, x, y);
            case BinaryOp::Mul: return checked(mul_overflow, x, y);
            case BinaryOp::Div: return floor_div(x, y);
            case BinaryOp::Lt: return x < y;
            case BinaryOp::Le: return x <= y;
            case BinaryOp::Gt: return x > y;
            case BinaryOp::Ge: return x >= y;
            default: throw Error(ErrorKind::Session, "unsupported operator at runtime");
          }
        }
      },
      e->node);
}

inline std::string render_store(const Store& store) {
  std::string out = "{";
  for (const auto& [k, v] : store) {
    if (out.size() > 1) out += ", ";
    out += k + "=" + display(v);
  }
  return out + "}";
}

}  // namespace detail

/// Evaluates a process expression under a store (floor division, checked
/// arithmetic).
inline Value evaluate(const ExprPtr& e, const Store& store) { return detail::eval(e, store); }

/// Interpreter for a system of participant processes. Every participant is a
/// cooperative unit; channels are unbounded FIFO queues of serialized values.
class Simulator {
 public:
  Simulator(const ProtocolFile& file, SimulationOptions options)
      : options_(std::move(options)), solver_(options_.solver), rng_(options_.scheduler.seed) {
    for (const auto& p : file.participants) units_.push_back(Unit{p.name, p.process, {}, {}, {}, false, {}});
  }

  Trace run() {
    std::vector<std::size_t> order(units_.size());
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = 0;
    while (true) {
      establish_sessions();
      if (std::all_of(units_.begin(), units_.end(), [](const Unit& u) { return u.done; })) break;
      if (trace_.events.size() >= options_.max_steps)
        throw Error(ErrorKind::ResourceExhausted, "simulation exceeded " + std::to_string(options_.max_steps) + " steps");

      if (options_.scheduler.kind == Scheduler::Kind::Seeded) {
        std::shuffle(order.begin(), order.end(), rng_);
        cursor = 0;
      }
      bool progressed = false;
      for (std::size_t k = 0; k < units_.size(); ++k) {
        std::size_t i = order[(cursor + k) % units_.size()];
        if (units_[i].done || units_[i].waiting()) continue;
        if (advance(units_[i])) {
          cursor = (cursor + k + 1) % units_.size();
          progressed = true;
          break;
        }
      }
      if (!progressed) deadlock();
    }
    for (const auto& u : units_) trace_.stores[u.name] = u.store;
    return trace_;
  }

 private:
  struct RecFrame {
    ProcessPtr node;  // the Rec
  };
  struct Unit {
    std::string name;
    ProcessPtr current;
    Store store;
    std::map<std::string, std::string> channels;  // local name -> channel instance
    std::map<std::string, RecFrame> recs;
    bool done = false;
    std::string awaiting;

    bool waiting() const {
      return std::holds_alternative<Process::Init>(current->node) || std::holds_alternative<Process::Join>(current->node);
    }
  };
  struct Channel {
    std::deque<std::string> queue;
    std::string display;
  };

  SimulationOptions options_;
  Solver solver_;
  std::mt19937_64 rng_;
  std::vector<Unit> units_;
  std::map<std::string, Channel> channels_;
  std::map<std::string, int> sessions_;  // service -> sessions started
  Trace trace_;

  void establish_sessions() {
    for (auto& u : units_) {
      auto* init = std::get_if<Process::Init>(&u.current->node);
      if (!init) continue;
      std::vector<Unit*> joiners;
      for (std::size_t r = 1; r < init->roles.size(); ++r) {
        Unit* found = nullptr;
        for (auto& v : units_) {
          auto* j = std::get_if<Process::Join>(&v.current->node);
          if (j && j->service == init->service && j->role == init->roles[r] &&
              std::find(joiners.begin(), joiners.end(), &v) == joiners.end()) {
            found = &v;
            break;
          }
        }
        if (!found) break;
        joiners.push_back(found);
      }
      if (joiners.size() + 1 != init->roles.size()) continue;

      int n = ++sessions_[init->service];
      std::vector<std::string> instances;
      for (const auto& c : init->channels) {
        std::string id = n == 1 ? c : c + "#" + std::to_string(n);
        channels_[id] = Channel{{}, id};
        instances.push_back(id);
      }
      auto enter = [&](Unit& unit, const std::vector<std::string>& names, const ProcessPtr& body) {
        for (std::size_t i = 0; i < names.size() && i < instances.size(); ++i) unit.channels[names[i]] = instances[i];
        unit.current = body;
      };
      ProcessPtr body = init->body;
      std::vector<std::string> names = init->channels;
      for (Unit* j : joiners) {
        const auto& join = std::get<Process::Join>(j->current->node);
        enter(*j, join.channels, join.body);
      }
      enter(u, names, body);
    }
  }

  std::string instance(Unit& u, const std::string& local, SourcePos pos) {
    auto it = u.channels.find(local);
    if (it == u.channels.end())
      throw Error(ErrorKind::ChannelNotInScope, u.name + ": channel '" + local + "' is not in scope at runtime", pos);
    return it->second;
  }

  void emit(Unit& u, Action a, std::string channel, std::string payload, std::string wire = {}) {
    trace_.events.push_back(
        TraceEvent{trace_.events.size() + 1, u.name, a, std::move(channel), std::move(payload), std::move(wire)});
  }

  void monitor(const Unit& u, const FormulaPtr& assertion, const Store& store, SourcePos pos) {
    if (!options_.monitor_assertions || logic::is_true(assertion)) return;
    std::map<std::string, ExprPtr> bindings;
    for (const auto& v : logic::free_variables(assertion)) {
      auto it = store.find(v);
      if (it != store.end() && !std::holds_alternative<std::string>(it->second)) bindings[v] = to_expr(it->second);
    }
    FormulaPtr closed = logic::substitute(assertion, bindings);
    bool holds = logic::free_variables(closed).empty() ? solver_.is_valid(closed) : solver_.is_satisfiable(closed);
    if (!holds)
      throw Error(ErrorKind::MonitorViolation,
                  u.name + ": assertion " + logic::to_string(assertion, logic::Style::Spaced) +
                      " violated under store " + detail::render_store(store),
                  pos);
  }

  void bind_rec(Unit& u, const Process::Rec& rec, const std::vector<ExprPtr>& args,
                const std::vector<std::string>& channel_args, SourcePos pos) {
    std::vector<Value> values;
    for (const auto& a : args) values.push_back(detail::eval(a, u.store));
    std::vector<std::string> inst;
    for (const auto& c : channel_args) inst.push_back(instance(u, c, pos));
    if (values.size() != rec.params.size() || inst.size() != rec.channel_params.size())
      throw Error(ErrorKind::ArityMismatch, u.name + ": wrong number of arguments for '" + rec.var + "'", pos);
    for (std::size_t i = 0; i < values.size(); ++i) u.store[rec.params[i].name] = values[i];
    for (std::size_t i = 0; i < inst.size(); ++i) u.channels[rec.channel_params[i]] = inst[i];
    u.current = rec.body;
  }

  // Runs silent moves then at most one visible action. Returns false when
  // the unit is blocked on an empty channel.
  bool advance(Unit& u) {
    while (true) {
      const ProcessPtr node = u.current;
      const SourcePos pos = node->pos;
      if (auto* n = std::get_if<Process::Inact>(&node->node)) {
        (void)n;
        u.done = true;
        emit(u, Action::End, "-", "-");
        return true;
      }
      if (auto* n = std::get_if<Process::If>(&node->node)) {
        u.current = std::get<bool>(detail::eval(n->cond, u.store)) ? n->then_body : n->else_body;
        continue;
      }
      if (auto* n = std::get_if<Process::Rec>(&node->node)) {
        u.recs[n->var] = RecFrame{node};
        bind_rec(u, *n, n->args, n->channel_args, pos);
        monitor(u, n->invariant, u.store, pos);
        continue;
      }
      if (auto* n = std::get_if<Process::Call>(&node->node)) {
        auto it = u.recs.find(n->var);
        if (it == u.recs.end())
          throw Error(ErrorKind::UnknownRecursionVariable, u.name + ": unknown recursion variable '" + n->var + "'", pos);
        const auto& rec = std::get<Process::Rec>(it->second.node->node);
        std::string args;
        for (std::size_t i = 0; i < n->args.size(); ++i) {
          if (i) args += ",";
          args += display(detail::eval(n->args[i], u.store));
        }
        bind_rec(u, rec, n->args, n->channel_args, pos);
        monitor(u, rec.invariant, u.store, pos);
        emit(u, Action::RecCall, "-", n->var + "(" + args + ")");
        return true;
      }
      if (auto* n = std::get_if<Process::Send>(&node->node)) {
        std::string ch = instance(u, n->channel, pos);
        Value v = detail::eval(n->value, u.store);
        Store after = u.store;
        after[n->var] = v;
        monitor(u, n->assertion, after, pos);
        std::string wire = serialize_value(v);
        channels_[ch].queue.push_back(wire);
        u.store = std::move(after);
        u.current = n->body;
        emit(u, Action::Send, ch, display(v), wire);
        return true;
      }
      if (auto* n = std::get_if<Process::Receive>(&node->node)) {
        std::string ch = instance(u, n->channel, pos);
        auto& q = channels_[ch].queue;
        if (q.empty()) {
          u.awaiting = ch;
          return false;
        }
        std::string wire = q.front();
        q.pop_front();
        Value v = deserialize_value(wire, n->sort);
        u.store[n->var] = v;
        monitor(u, n->assertion, u.store, pos);
        u.current = n->body;
        emit(u, Action::Receive, ch, display(v), wire);
        return true;
      }
      if (auto* n = std::get_if<Process::Select>(&node->node)) {
        std::string ch = instance(u, n->channel, pos);
        monitor(u, n->assertion, u.store, pos);
        std::string wire = serialize_label(n->branch_id, n->label);
        channels_[ch].queue.push_back(wire);
        u.current = n->body;
        emit(u, Action::Select, ch, n->label, wire);
        return true;
      }
      if (auto* n = std::get_if<Process::Branch>(&node->node)) {
        std::string ch = instance(u, n->channel, pos);
        auto& q = channels_[ch].queue;
        if (q.empty()) {
          u.awaiting = ch;
          return false;
        }
        std::string wire = q.front();
        q.pop_front();
        std::vector<std::string> labels;
        for (const auto& b : n->branches) labels.push_back(b.label);
        std::string label = deserialize_label(wire, n->branch_id, labels);
        for (const auto& b : n->branches) {
          if (b.label != label) continue;
          monitor(u, b.assertion, u.store, b.pos);
          u.current = b.body;
        }
        emit(u, Action::Branch, ch, label, wire);
        return true;
      }
      // Init/Join are resolved by establish_sessions.
      return false;
    }
  }

  [[noreturn]] void deadlock() {
    std::string msg = "deadlock:";
    bool first = true;
    for (const auto& u : units_) {
      if (u.done) continue;
      msg += first ? " " : ", ";
      first = false;
      if (u.waiting())
        msg += u.name + " waits for session '" + process::heading(u.current) + "'";
      else
        msg += u.name + " waits on " + u.awaiting;
    }
    throw Error(ErrorKind::Deadlock, msg);
  }
};

inline Trace simulate(const ProtocolFile& file, const SimulationOptions& options = {}) {
  return Simulator(file, options).run();
}

}  // namespace mpst::runtime
