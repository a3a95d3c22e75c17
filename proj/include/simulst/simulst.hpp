#pragma once

#include "simulst/agents/agent.hpp"
#include "simulst/agents/external.hpp"
#include "simulst/agents/handle.hpp"
#include "simulst/agents/protocol.hpp"
#include "simulst/agents/toy.hpp"
#include "simulst/agents/transport.hpp"
#include "simulst/core/corpus_io.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/session.hpp"
#include "simulst/core/session_io.hpp"
#include "simulst/core/types.hpp"
#include "simulst/dataprep/examples.hpp"
#include "simulst/dataprep/mixture.hpp"
#include "simulst/dataprep/prefix_alignment.hpp"
#include "simulst/eval/evaluate.hpp"
#include "simulst/eval/run_config.hpp"
#include "simulst/eval/score_exchange.hpp"
#include "simulst/metrics/bleu.hpp"
#include "simulst/metrics/latency.hpp"
#include "simulst/metrics/length.hpp"
#include "simulst/metrics/report.hpp"
#include "simulst/policies/policy.hpp"
#include "simulst/policies/style.hpp"
#include "simulst/textproc/rmrep.hpp"
#include "simulst/textproc/tags.hpp"
#include "simulst/textproc/tokenize.hpp"
