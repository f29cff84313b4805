#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "peerfed/error.hpp"
#include "peerfed/metrics.hpp"
#include "peerfed/rng.hpp"

using namespace peerfed;
using namespace peerfed::metrics;

TEST_CASE("confusion matrix basic tallies") {
    const auto cm = confusion({1, 0, 1}, {1, 0, 1});
    CHECK(cm.tp == 2);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);
    CHECK(cm.total() == 3);

    const auto flipped = confusion({0, 1, 0}, {1, 0, 1});
    CHECK(flipped.tp == 0);
    CHECK(flipped.tn == 0);
    CHECK(flipped.fp == 1);
    CHECK(flipped.fn == 2);

    CHECK_THROWS_AS(confusion({1}, {1, 0}), Error);
    CHECK_THROWS_AS(confusion({}, {}), Error);
}

TEST_CASE("confusion matches a brute-force tally on random vectors") {
    RngStream rng(17, 0);
    std::vector<int> preds(200), labels(200);
    for (int& p : preds) p = static_cast<int>(rng.below(2));
    for (int& y : labels) y = static_cast<int>(rng.below(2));

    const auto cm = confusion(preds, labels);
    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == 1 && labels[i] == 1) ++tp;
        if (preds[i] == 1 && labels[i] == 0) ++fp;
        if (preds[i] == 0 && labels[i] == 1) ++fn;
        if (preds[i] == 0 && labels[i] == 0) ++tn;
    }
    CHECK(cm.tp == tp);
    CHECK(cm.fp == fp);
    CHECK(cm.fn == fn);
    CHECK(cm.tn == tn);
}

TEST_CASE("accuracy") {
    CHECK(accuracy({5, 0, 0, 5}) == 1.0);
    CHECK(accuracy({0, 5, 5, 0}) == 0.0);
    CHECK_THROWS_AS(accuracy({0, 0, 0, 0}), Error);
}

TEST_CASE("a coin-flip classifier on balanced labels scores about one half") {
    RngStream rng(23, 0);
    const int n = 10000;
    std::vector<int> preds(n), labels(n);
    for (int i = 0; i < n; ++i) {
        preds[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
        labels[static_cast<std::size_t>(i)] = i % 2;
    }
    const double acc = accuracy(confusion(preds, labels));
    CHECK(acc == doctest::Approx(0.5).epsilon(0.04));
    CHECK(acc >= 0.48);
    CHECK(acc <= 0.52);
}

TEST_CASE("label swap symmetry keeps accuracy fixed") {
    RngStream rng(29, 0);
    std::vector<int> preds(101), labels(101);
    for (int& p : preds) p = static_cast<int>(rng.below(2));
    for (int& y : labels) y = static_cast<int>(rng.below(2));

    const auto cm = confusion(preds, labels);
    std::vector<int> preds_inv(preds.size()), labels_inv(labels.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        preds_inv[i] = 1 - preds[i];
        labels_inv[i] = 1 - labels[i];
    }
    const auto cm_inv = confusion(preds_inv, labels_inv);
    CHECK(cm_inv.tp == cm.tn);
    CHECK(cm_inv.tn == cm.tp);
    CHECK(cm_inv.fp == cm.fn);
    CHECK(cm_inv.fn == cm.fp);
    CHECK(accuracy(cm_inv) == accuracy(cm));
    CHECK(accuracy(cm) + (1.0 - accuracy(cm)) == 1.0);
}

TEST_CASE("threshold predictions put the boundary in class 1") {
    CHECK(threshold_predictions({0.49, 0.5, 0.51, 0.0, 1.0}) ==
          std::vector<int>{0, 1, 1, 0, 1});
}
