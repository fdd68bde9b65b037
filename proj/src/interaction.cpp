#include "canary/interaction.hpp"

#include <thread>

#include "canary/error.hpp"

namespace canary {

InteractionResult run_interaction(ChatbotClient& client, const SiteTemplate& site, const std::string& round_label,
                                  SiteCondition condition, const std::string& interaction_id, ResponseStore* store,
                                  const Clock& clock) {
  auto prompts = build_prompts(site);
  auto make = [&](int index) {
    ResponseRecord r;
    r.chatbot_id = client.chatbot_id();
    r.site_id = site.site_id();
    r.interaction_id = interaction_id;
    r.query_index = index;
    r.condition = condition;
    r.round_label = round_label;
    r.transport = client.transport();
    return r;
  };
  auto persist = [&](const ResponseRecord& r) {
    if (store) store->append(r);
  };

  InteractionResult result;
  result.primary = make(1);
  std::unique_ptr<ChatSession> session;
  try {
    session = client.open_session();
    result.primary.raw_text = session->send(prompts.primary_text);
  } catch (const TransportError& e) {
    result.primary.failed = true;
    result.primary.error_detail = e.what();
  }
  result.primary.timestamp = clock();
  persist(result.primary);
  if (result.primary.failed) {
    result.failed = true;
    return result;
  }

  auto followup = make(2);
  try {
    followup.raw_text = session->send(prompts.followup_text);
  } catch (const TransportError& e) {
    followup.failed = true;
    followup.error_detail = e.what();
    result.failed = true;
  }
  followup.timestamp = clock();
  persist(followup);
  result.followup = std::move(followup);
  return result;
}

Dispatcher::Dispatcher(Duration delay, Clock clock, Sleeper sleeper)
    : delay_(delay), clock_(std::move(clock)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](Duration d) { std::this_thread::sleep_for(d); };
}

Dispatcher::Lane& Dispatcher::lane(const std::string& chatbot_id) {
  std::lock_guard lock(lanes_mu_);
  auto& l = lanes_[chatbot_id];
  if (!l) l = std::make_unique<Lane>();
  return *l;
}

InteractionResult Dispatcher::run(ChatbotClient& client, const SiteTemplate& site, const std::string& round_label,
                                  SiteCondition condition, InteractionIdGenerator& ids, ResponseStore* store) {
  auto& l = lane(client.chatbot_id());
  std::lock_guard lock(l.mu);
  if (l.last_finished) {
    auto wait = *l.last_finished + delay_ - clock_();
    if (wait > Duration::zero()) sleeper_(wait);
  }
  auto result = run_interaction(client, site, round_label, condition, ids.next(), store, clock_);
  l.last_finished = clock_();
  return result;
}

}  // namespace canary
