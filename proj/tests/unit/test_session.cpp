#include <doctest.h>

#include <map>

#include "blockdbg/core/error.hpp"
#include "blockdbg/debug/session.hpp"
#include "fixtures.hpp"
#include "programs.hpp"

using namespace blockdbg;
using blockdbg::testing::corpus_program_ptr;
using blockdbg::testing::inline_program;
using blockdbg::testing::one_script;

namespace {

const char* kRepeat3 = R"([
  {"id":"r","op":"repeat","args":{"times":3},"substacks":[[
    {"id":"c","op":"change_var","args":{"var":"x","by":1}}]]},
  {"id":"after","op":"say","args":{"message":{"op":"var","name":"x"}}}])";

struct Harness {
  explicit Harness(std::shared_ptr<const Program> p, SessionConfig config = {})
      : session(std::move(p), with_ids(std::move(config)), sink, [this] { return ++now; }) {}

  static SessionConfig with_ids(SessionConfig c) {
    if (c.session_id.empty()) c.session_id = "t";
    return c;
  }

  std::size_t count(EventKind kind) const {
    std::size_t n = 0;
    for (const auto& e : sink.events()) n += e.kind == kind;
    return n;
  }

  double var(const std::string& name) const { return session.machine().globals.at(name).to_number(); }
  std::string paused_at() const { return session.paused_location() ? session.paused_location()->block : "-"; }

  std::int64_t now = 0;
  MemoryLogSink sink;
  DebugSession session;
};

ErrorKind error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kSyntax;
}

}  // namespace

TEST_CASE("start_session") {
  Harness h(corpus_program_ptr("sum_list"));
  CHECK(h.session.status() == SessionStatus::kPaused);
  CHECK(h.paused_at() == "b1");
  CHECK(h.session.paused_location()->reason == PauseReason::kEntryPause);
  CHECK(h.sink.events()[0].kind == EventKind::kSessionStart);
  CHECK(h.sink.events()[1].kind == EventKind::kProgramLoad);

  Harness empty(std::make_shared<const Program>());
  CHECK(empty.session.status() == SessionStatus::kTerminated);
  CHECK_FALSE(empty.session.paused_location().has_value());

  SessionConfig config;
  config.breakpoints = {"b4"};
  Harness launch(corpus_program_ptr("sum_list"), config);
  CHECK(launch.session.breakpoints().count("b4") == 1);
  launch.session.continue_();
  CHECK(launch.paused_at() == "b4");

  // Without pause_on_entry the program runs straight to the breakpoint.
  config.pause_on_entry = false;
  Harness running(corpus_program_ptr("sum_list"), config);
  CHECK(running.paused_at() == "b4");
  CHECK(running.session.paused_location()->reason == PauseReason::kBreakpoint);

  CHECK_THROWS_AS(Harness(inline_program(R"({"scripts":[{"trigger":"green_flag","body":[
      {"id":"a","op":"say","args":{"message":{"op":"var","name":"ghost"}}}]}]})")),
                  Error);
}

TEST_CASE("set and clear breakpoints") {
  Harness h(corpus_program_ptr("sum_list"));
  h.session.set_breakpoint("b3");
  h.session.clear_breakpoint("b3");
  CHECK(h.session.breakpoints().empty());
  CHECK(h.count(EventKind::kBreakpointSet) == 1);
  CHECK(h.count(EventKind::kBreakpointClear) == 1);

  CHECK(error_of([&] { h.session.set_breakpoint("nope"); }) == ErrorKind::kUnknownBlockId);
  CHECK(h.session.breakpoints().empty());
  CHECK(h.count(EventKind::kBreakpointSet) == 2);
  CHECK(h.sink.events().back().payload.at("ok") == false);
  CHECK(error_of([&] { h.session.clear_breakpoint("b3"); }) == ErrorKind::kUnknownBlockId);
}

TEST_CASE("a breakpoint set while running applies at the next boundary") {
  struct Poster : SessionObserver {
    CommandQueue* queue = nullptr;
    DebugSession* session = nullptr;
    int ticks = 0;
    void on_tick(const TickResult&) override {
      if (++ticks == 2) queue->post([this] { session->set_breakpoint("b5"); });
    }
  };
  Harness h(corpus_program_ptr("sum_list"));
  CommandQueue queue;
  Poster poster;
  poster.queue = &queue;
  poster.session = &h.session;
  h.session.set_command_queue(&queue);
  h.session.set_observer(&poster);
  h.session.continue_();
  CHECK(h.paused_at() == "b5");
  CHECK(h.session.machine().tick_count == 4);  // b1 b2 b3 b4, then pause before b5
}

TEST_CASE("continue") {
  Harness plain(one_script(R"({"x":0})", kRepeat3));
  plain.session.continue_();
  CHECK(plain.session.status() == SessionStatus::kTerminated);
  CHECK(plain.session.machine().output == std::vector<std::string>{"3"});

  Harness loop(one_script(R"({"x":0})", kRepeat3));
  loop.session.set_breakpoint("c");
  int pauses = 0;
  for (int i = 0; i < 4; ++i) {
    loop.session.continue_();
    if (loop.session.status() == SessionStatus::kPaused) {
      ++pauses;
      CHECK(loop.paused_at() == "c");
      CHECK(loop.var("x") == pauses - 1);  // paused before the body runs
    }
  }
  CHECK(pauses == 3);
  CHECK(loop.session.status() == SessionStatus::kTerminated);
  CHECK(loop.count(EventKind::kBreakpointHit) == 3);

  Harness dead(one_script(R"({"x":0})", R"([{"id":"i","op":"if","args":{"condition":false},"substacks":[[
      {"id":"never","op":"say","args":{"message":"no"}}]]}])"));
  dead.session.set_breakpoint("never");
  dead.session.continue_();
  CHECK(dead.session.status() == SessionStatus::kTerminated);
  CHECK(dead.count(EventKind::kBreakpointHit) == 0);

  CHECK(error_of([&] { dead.session.continue_(); }) == ErrorKind::kNotPaused);
  CHECK(dead.sink.events().back().kind == EventKind::kContinue);
}

TEST_CASE("step_over") {
  Harness h(one_script(R"({"x":0})", kRepeat3));
  h.session.step_over();
  CHECK(h.paused_at() == "after");
  CHECK(h.var("x") == 3);
  h.session.step_over();
  CHECK(h.session.status() == SessionStatus::kTerminated);

  auto p = inline_program(R"({"variables":{"n":0},"procedures":[{"name":"p","params":[],"body":[
      {"id":"p1","op":"change_var","args":{"var":"n","by":1}},
      {"id":"p2","op":"change_var","args":{"var":"n","by":1}}]}],
    "scripts":[{"trigger":"green_flag","body":[{"id":"call","op":"call","args":{"proc":"p","args":[]}},
      {"id":"end","op":"say","args":{"message":"done"}}]}]})");
  Harness bp(p);
  bp.session.set_breakpoint("p2");
  bp.session.step_over();
  CHECK(bp.paused_at() == "p2");
  CHECK(bp.session.paused_location()->reason == PauseReason::kBreakpoint);
  CHECK(bp.var("n") == 1);
}

TEST_CASE("step_in") {
  Harness h(one_script(R"({"x":0})", kRepeat3));
  h.session.step_in();
  CHECK(h.paused_at() == "c");
  CHECK(h.var("x") == 0);
  CHECK(h.session.paused_location()->stack_depth == 2);

  Harness simple(one_script(R"({"x":0})",
                            R"([{"id":"s","op":"set_var","args":{"var":"x","value":1}},
                                {"id":"t","op":"say","args":{"message":"t"}}])"));
  simple.session.step_in();
  CHECK(simple.paused_at() == "t");
  CHECK(simple.var("x") == 1);

  Harness skip(one_script(R"({"x":0})", R"([{"id":"i","op":"if","args":{"condition":false},"substacks":[[
      {"id":"inner","op":"say","args":{"message":"no"}}]]},
      {"id":"next","op":"say","args":{"message":"yes"}}])"));
  skip.session.step_in();
  CHECK(skip.paused_at() == "next");

  Harness proc(corpus_program_ptr("greet_procedure"));
  proc.session.step_in();
  CHECK(proc.paused_at() == "p1");
  CHECK(proc.session.paused_location()->stack_depth == 2);
}

TEST_CASE("step_out") {
  Harness h(one_script(R"({"x":0})", kRepeat3));
  h.session.step_in();
  REQUIRE(h.paused_at() == "c");
  h.session.step_out();
  CHECK(h.paused_at() == "after");
  CHECK(h.var("x") == 3);

  Harness proc(corpus_program_ptr("greet_procedure"));
  proc.session.step_in();
  REQUIRE(proc.paused_at() == "p1");
  proc.session.step_out();
  CHECK(proc.paused_at() == "b2");

  Harness top(corpus_program_ptr("sum_list"));
  CHECK(error_of([&] { top.session.step_out(); }) == ErrorKind::kAtTopFrame);
  CHECK(top.sink.events().back().kind == EventKind::kStepOut);
  CHECK(top.sink.events().back().payload.at("ok") == false);
  CHECK(top.paused_at() == "b1");
}

TEST_CASE("watches") {
  Harness h(one_script(R"({"x":0})",
                       R"([{"id":"s","op":"set_var","args":{"var":"x","value":1}},
                           {"id":"t","op":"say","args":{"message":"t"}}])",
                       R"(,"lists":{"l":["a"]})"));
  CHECK(h.session.add_watch("x + 1") == 1);
  CHECK(h.session.add_watch("item 1 of l") == 2);
  CHECK(h.session.add_watch("ghost") == 3);
  CHECK(error_of([&] { h.session.add_watch("x +"); }) == ErrorKind::kExpressionParse);
  CHECK(h.count(EventKind::kWatchAdd) == 4);

  h.session.step_over();
  const std::uint64_t ticks = h.session.machine().tick_count;
  auto results = h.session.eval_watches();
  REQUIRE(results.size() == 3);
  CHECK(results[0].value == Value(2));
  CHECK(results[1].value == Value("a"));
  CHECK_FALSE(results[2].value.has_value());
  CHECK_FALSE(results[2].note.empty());
  CHECK(h.session.machine().tick_count == ticks);  // purity

  h.session.remove_watch(2);
  CHECK(h.session.watches().size() == 2);
  CHECK(error_of([&] { h.session.remove_watch(2); }) == ErrorKind::kUnknownWatchId);
}

TEST_CASE("watches and inspection see procedure parameters") {
  auto p = inline_program(R"({"variables":{"x":1},"lists":{"l":[1,2]},
    "procedures":[{"name":"p","params":["n"],"body":[{"id":"p1","op":"say","args":{"message":{"op":"param","name":"n"}}}]}],
    "scripts":[{"trigger":"green_flag","body":[{"id":"c","op":"call","args":{"proc":"p","args":[5]}}]}]})");
  Harness h(p);
  h.session.add_watch("n");
  h.session.step_in();
  REQUIRE(h.paused_at() == "p1");
  CHECK(h.session.eval_watches()[0].value == Value(5));
  VariableSnapshot snap = h.session.inspect_variables();
  CHECK(snap.globals.at("x") == Value(1));
  CHECK(snap.bindings.at("n") == Value(5));
  REQUIRE(snap.lists.at("l").size() == 2);
  CHECK(snap.lists.at("l")[0].index == 1);
  CHECK(snap.lists.at("l")[1].index == 2);
  CHECK(snap.lists.at("l")[1].value == Value(2));
  auto json = snapshot_to_json(snap);
  CHECK(json.at("lists").at("l")[0].at("index") == 1);
}

TEST_CASE("paused_location") {
  Harness h(corpus_program_ptr("sum_list"));
  CHECK(h.session.paused_location()->reason == PauseReason::kEntryPause);
  h.session.set_breakpoint("b6");
  h.session.continue_();
  CHECK(h.paused_at() == "b6");
  CHECK(h.session.paused_location()->reason == PauseReason::kBreakpoint);
  h.session.continue_();
  CHECK_FALSE(h.session.paused_location().has_value());
}

TEST_CASE("every operation logs exactly one event of its kind") {
  Harness h(one_script(R"({"x":0})", kRepeat3));
  std::map<EventKind, std::size_t> before;
  auto snapshot = [&] {
    before.clear();
    for (const auto& e : h.sink.events()) ++before[e.kind];
  };
  auto grew_by_one = [&](EventKind kind) {
    std::map<EventKind, std::size_t> now;
    for (const auto& e : h.sink.events()) ++now[e.kind];
    return now[kind] == before[kind] + 1;
  };
  snapshot();
  h.session.set_breakpoint("c");
  CHECK(grew_by_one(EventKind::kBreakpointSet));
  snapshot();
  h.session.add_watch("x");
  CHECK(grew_by_one(EventKind::kWatchAdd));
  snapshot();
  h.session.step_in();
  CHECK(grew_by_one(EventKind::kStepIn));
  snapshot();
  h.session.eval_watches();
  CHECK(grew_by_one(EventKind::kWatchEval));
  snapshot();
  h.session.inspect_variables();
  CHECK(grew_by_one(EventKind::kVariableInspect));
  snapshot();
  h.session.step_over();
  CHECK(grew_by_one(EventKind::kStepOver));
  snapshot();
  h.session.continue_();
  CHECK(grew_by_one(EventKind::kContinue));
  snapshot();
  h.session.clear_breakpoint("c");
  CHECK(grew_by_one(EventKind::kBreakpointClear));
  snapshot();
  h.session.end_session();
  CHECK(grew_by_one(EventKind::kSessionEnd));
  h.session.end_session();
  CHECK(h.count(EventKind::kSessionEnd) == 1);
}

TEST_CASE("edits restart the machine and keep resolvable breakpoints") {
  Harness h(corpus_program_ptr("index_bug"));
  h.session.set_breakpoint("b4");
  h.session.set_breakpoint("b5");
  h.session.continue_();
  Edit fix;
  fix.kind = EditKind::kDeleteBlock;
  fix.target = "b5";
  h.session.apply_edit(fix);
  CHECK(h.paused_at() == "b1");
  CHECK(h.session.machine().tick_count == 0);
  CHECK(h.session.breakpoints().count("b4") == 1);
  CHECK(h.session.breakpoints().count("b5") == 0);
  const auto& edit_event = h.sink.events()[h.sink.events().size() - 2];
  CHECK(edit_event.kind == EventKind::kProgramEdit);
  CHECK(edit_event.payload.at("ok") == true);

  Edit bad;
  bad.kind = EditKind::kDeleteBlock;
  bad.target = "missing";
  CHECK(error_of([&] { h.session.apply_edit(bad); }) == ErrorKind::kNotFound);
  CHECK(h.sink.events().back().payload.at("ok") == false);

  h.session.continue_();
  CHECK(h.count(EventKind::kRunStart) == 2);  // one per program version
}

TEST_CASE("fuel bounds a resume and pauses with reason step") {
  SessionConfig config;
  config.fuel = 25;
  Harness h(corpus_program_ptr("forever_hi"), config);
  h.session.continue_();
  CHECK(h.session.status() == SessionStatus::kPaused);
  CHECK(h.session.paused_location()->reason == PauseReason::kStep);
  CHECK(h.session.machine().tick_count == 25);
}

TEST_CASE("whole-machine pause freezes every thread") {
  Harness h(corpus_program_ptr("two_scripts"));
  h.session.set_breakpoint("c2");
  h.session.continue_();
  REQUIRE(h.paused_at() == "c2");
  const MachineState frozen = h.session.machine();
  h.session.eval_watches();
  h.session.inspect_variables();
  CHECK(h.session.machine() == frozen);
  CHECK(h.session.paused_location()->thread == 1);
}

TEST_CASE("end_session during a run waits for the boundary") {
  struct Ender : SessionObserver {
    CommandQueue* queue = nullptr;
    DebugSession* session = nullptr;
    int ticks = 0;
    void on_tick(const TickResult&) override {
      if (++ticks == 5) queue->post([this] { session->end_session(); });
    }
  };
  Harness h(corpus_program_ptr("forever_hi"));
  CommandQueue queue;
  Ender ender;
  ender.queue = &queue;
  ender.session = &h.session;
  h.session.set_command_queue(&queue);
  h.session.set_observer(&ender);
  h.session.continue_();
  CHECK(h.session.ended());
  CHECK(h.sink.events().back().kind == EventKind::kSessionEnd);
  CHECK(h.sink.events()[h.sink.events().size() - 2].kind == EventKind::kPause);
}

TEST_CASE("timestamps never go backwards") {
  std::int64_t t = 100;
  MemoryLogSink sink;
  SessionConfig config;
  config.session_id = "clock";
  DebugSession s(corpus_program_ptr("sum_list"), config, sink, [&t] { return t -= 7; });
  s.continue_();
  for (std::size_t i = 1; i < sink.events().size(); ++i) {
    CHECK(sink.events()[i].timestamp >= sink.events()[i - 1].timestamp);
  }
}
