#include "tidagcn/data/synthetic.hpp"

#include <cmath>

#include "tidagcn/numeric/errors.hpp"
#include "tidagcn/numeric/random.hpp"

namespace tidagcn {

std::size_t SyntheticSpec::topic_of(Domain d, std::size_t item) const {
  (void)d;
  return item % n_topics;
}

std::size_t SyntheticSpec::type_of(Domain d, std::size_t item) const {
  return topic_of(d, item) % n_item_types;
}

double SyntheticSpec::mean_gap(std::size_t type) const {
  if (n_item_types == 1) return base_gap;
  return base_gap * std::pow(gap_ratio, static_cast<double>(type) /
                                            static_cast<double>(n_item_types - 1));
}

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("synthetic spec: " + what); };
  if (n_accounts == 0) fail("n_accounts must be >= 1");
  if (users_min == 0 || users_max < users_min) fail("need 1 <= users_min <= users_max");
  if (n_items_a == 0 || n_items_b == 0) fail("item counts must be >= 1");
  if (sequences() < n_accounts || sequences() > 2 * n_accounts) {
    fail("n_sequences must lie in [n_accounts, 2 * n_accounts]");
  }
  if (seq_len_min == 0 || seq_len_max < seq_len_min) fail("need 1 <= seq_len_min <= seq_len_max");
  if (n_topics == 0 || n_topics > std::min(n_items_a, n_items_b)) {
    fail("n_topics must lie in [1, min(n_items_a, n_items_b)]");
  }
  if (n_item_types == 0) fail("n_item_types must be >= 1");
  for (auto [name, p] : {std::pair{"topic_focus", topic_focus}, {"correlation", correlation},
                         {"chain_prob", chain_prob}, {"session_switch", session_switch}}) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  }
  if (!(popularity_skew >= 0.0)) fail("popularity_skew must be >= 0");
  if (!(base_gap >= 1.0) || !(gap_ratio > 0.0) || !(gap_sigma >= 0.0)) {
    fail("need base_gap >= 1, gap_ratio > 0, gap_sigma >= 0");
  }
}

SyntheticSpec SyntheticSpec::from(const KeyValues& kv) {
  SyntheticSpec s;
  s.n_accounts = kv.get_uint("n_accounts", s.n_accounts);
  s.users_min = kv.get_uint("users_min", s.users_min);
  s.users_max = kv.get_uint("users_max", s.users_max);
  s.n_items_a = kv.get_uint("n_items_a", s.n_items_a);
  s.n_items_b = kv.get_uint("n_items_b", s.n_items_b);
  s.n_sequences = kv.get_uint("n_sequences", s.n_sequences);
  s.seq_len_min = kv.get_uint("seq_len_min", s.seq_len_min);
  s.seq_len_max = kv.get_uint("seq_len_max", s.seq_len_max);
  s.n_topics = kv.get_uint("n_topics", s.n_topics);
  s.topic_focus = kv.get_double("topic_focus", s.topic_focus);
  s.correlation = kv.get_double("correlation", s.correlation);
  s.chain_prob = kv.get_double("chain_prob", s.chain_prob);
  s.session_switch = kv.get_double("session_switch", s.session_switch);
  s.popularity_skew = kv.get_double("popularity_skew", s.popularity_skew);
  s.n_item_types = kv.get_uint("n_item_types", s.n_item_types);
  s.base_gap = kv.get_double("base_gap", s.base_gap);
  s.gap_ratio = kv.get_double("gap_ratio", s.gap_ratio);
  s.gap_sigma = kv.get_double("gap_sigma", s.gap_sigma);
  s.seed = kv.get_uint("seed", s.seed);
  kv.require_all_used();
  s.validate();
  return s;
}

namespace {

// Items of one topic in one domain with their popularity weights.
struct TopicItems {
  std::vector<std::size_t> items;
  std::vector<double> weights;
};

std::vector<TopicItems> topic_tables(const SyntheticSpec& spec, Domain d, std::size_t n_items) {
  std::vector<TopicItems> topics(spec.n_topics);
  for (std::size_t i = 0; i < n_items; ++i) {
    auto& t = topics[spec.topic_of(d, i)];
    t.weights.push_back(1.0 / std::pow(static_cast<double>(t.items.size() + 1), spec.popularity_skew));
    t.items.push_back(i);
  }
  return topics;
}

// Next item of the same topic in id order, wrapping around.
std::size_t successor(const SyntheticSpec& spec, std::size_t item, std::size_t n_items) {
  const std::size_t next = item + spec.n_topics;
  return next < n_items ? next : item % spec.n_topics;
}

}  // namespace

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticData out;
  Dataset& ds = out.dataset;
  SyntheticTruth& truth = out.truth;
  const std::size_t n_items[2] = {spec.n_items_a, spec.n_items_b};

  ds.account_ids.resize(spec.n_accounts);
  for (std::size_t a = 0; a < spec.n_accounts; ++a) ds.account_ids[a] = a;
  for (std::size_t d = 0; d < 2; ++d) {
    ds.item_ids[d].resize(n_items[d]);
    for (std::size_t i = 0; i < n_items[d]; ++i) ds.item_ids[d][i] = i;
  }

  // Users and their topics.
  for (std::size_t a = 0; a < spec.n_accounts; ++a) {
    truth.first_user.push_back(truth.user_account.size());
    const std::size_t n_users = spec.users_min + rng.below(spec.users_max - spec.users_min + 1);
    for (std::size_t u = 0; u < n_users; ++u) {
      truth.user_account.push_back(a);
      const std::size_t topic_a = rng.below(spec.n_topics);
      const std::size_t topic_b =
          rng.uniform() < spec.correlation ? topic_a : rng.below(spec.n_topics);
      truth.user_topic[0].push_back(topic_a);
      truth.user_topic[1].push_back(topic_b);
    }
  }
  truth.first_user.push_back(truth.user_account.size());

  const std::vector<TopicItems> topics[2] = {topic_tables(spec, Domain::A, n_items[0]),
                                             topic_tables(spec, Domain::B, n_items[1])};

  // Accounts below n_both get both domains; the rest alternate A, B.
  const std::size_t n_both = spec.sequences() - spec.n_accounts;
  for (std::size_t a = 0; a < spec.n_accounts; ++a) {
    std::vector<Domain> domains;
    if (a < n_both) {
      domains = {Domain::A, Domain::B};
    } else {
      domains = {(a - n_both) % 2 == 0 ? Domain::A : Domain::B};
    }
    const std::size_t u0 = truth.first_user[a];
    const std::size_t n_users = truth.first_user[a + 1] - u0;
    for (Domain dom : domains) {
      const std::size_t d = index_of(dom);
      InteractionSequence seq{a, dom, {}};
      std::vector<std::size_t> users, topics_used;
      std::vector<bool> chained;
      const std::size_t len = spec.seq_len_min + rng.below(spec.seq_len_max - spec.seq_len_min + 1);
      std::size_t user = u0 + rng.below(n_users);
      std::vector<std::size_t> last_item(n_users, static_cast<std::size_t>(-1));
      std::int64_t t = static_cast<std::int64_t>(rng.below(1'000'000));
      for (std::size_t e = 0; e < len; ++e) {
        if (e > 0 && n_users > 1 && rng.uniform() < spec.session_switch) {
          std::size_t other = u0 + rng.below(n_users - 1);
          if (other >= user) ++other;
          user = other;
        }
        std::size_t& prev = last_item[user - u0];
        std::size_t item;
        bool chain = false;
        if (prev != static_cast<std::size_t>(-1) && rng.uniform() < spec.chain_prob) {
          item = successor(spec, prev, n_items[d]);
          chain = true;
        } else {
          const std::size_t topic = rng.uniform() < spec.topic_focus
                                        ? truth.user_topic[d][user]
                                        : rng.below(spec.n_topics);
          const auto& table = topics[d][topic];
          item = table.items[rng.categorical(table.weights)];
        }
        if (e > 0) {
          // Gap after the previously consumed event of the sequence.
          const std::size_t type = spec.type_of(dom, seq.events.back().item);
          const double s = spec.gap_sigma;
          const double gap = spec.mean_gap(type) * std::exp(s * rng.normal() - 0.5 * s * s);
          t += std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(gap)));
        }
        seq.events.push_back({item, t});
        users.push_back(user);
        topics_used.push_back(spec.topic_of(dom, item));
        chained.push_back(chain);
        prev = item;
      }
      ds.sequences.push_back(std::move(seq));
      truth.event_user.push_back(std::move(users));
      truth.event_topic.push_back(std::move(topics_used));
      truth.event_chained.push_back(std::move(chained));
    }
  }
  return out;
}

}  // namespace tidagcn
