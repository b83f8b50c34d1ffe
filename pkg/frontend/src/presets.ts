/**
 * Bundled copies of the repository preset designs for the preset
 * picker (kept in sync with presets/*.json by scripts/gen-presets.py).
 */

import type { DesignSpec } from "./types.js";

export const PRESETS: Record<string, DesignSpec> = {
  "gamma-setting-1a": {
  "model": "gamma",
  "design_values": {
    "group1": [
      2.11,
      0.69
    ],
    "group2": [
      2.43,
      0.79
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      }
    ],
    "group2": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      }
    ]
  },
  "characteristic": {
    "kind": "tail_prob",
    "threshold": 4.29
  },
  "comparison": "ratio",
  "interval": [
    0.8,
    1.25
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.5
  },
  "target_power": 0.6,
  "method": "laplace",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "gamma-setting-1a"
},
  "gamma-setting-2a": {
  "model": "gamma",
  "design_values": {
    "group1": [
      2.11,
      0.69
    ],
    "group2": [
      2.43,
      0.79
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "gamma",
        "shape": 34.23,
        "rate": 15.85
      },
      {
        "family": "gamma",
        "shape": 27.2,
        "rate": 38.15
      }
    ],
    "group2": [
      {
        "family": "gamma",
        "shape": 105.31,
        "rate": 42.96
      },
      {
        "family": "gamma",
        "shape": 85.49,
        "rate": 106.58
      }
    ]
  },
  "characteristic": {
    "kind": "tail_prob",
    "threshold": 4.29
  },
  "comparison": "ratio",
  "interval": [
    0.8,
    1.25
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.5
  },
  "target_power": 0.6,
  "method": "laplace",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "gamma-setting-2a"
},
  "gamma-setting-1c": {
  "model": "gamma",
  "design_values": {
    "group1": [
      2.11,
      0.69
    ],
    "group2": [
      2.43,
      0.79
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      }
    ],
    "group2": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 0.25
      }
    ]
  },
  "characteristic": {
    "kind": "tail_prob",
    "threshold": 4.29
  },
  "comparison": "ratio",
  "interval": [
    0.8695652173913044,
    1.15
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.8
  },
  "target_power": 0.8,
  "method": "laplace",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "gamma-setting-1c"
},
  "weibull-setting-1a": {
  "model": "weibull",
  "design_values": {
    "group1": [
      1.41,
      3.39
    ],
    "group2": [
      1.49,
      3.42
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 1
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 1
      }
    ],
    "group2": [
      {
        "family": "gamma",
        "shape": 2,
        "rate": 1
      },
      {
        "family": "gamma",
        "shape": 2,
        "rate": 1
      }
    ]
  },
  "characteristic": {
    "kind": "tail_prob",
    "threshold": 4.29
  },
  "comparison": "ratio",
  "interval": [
    0.8,
    1.25
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.5
  },
  "target_power": 0.6,
  "method": "hybrid",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "weibull-setting-1a"
},
  "bernoulli-setting-1a": {
  "model": "bernoulli",
  "design_values": {
    "group1": [
      0.15
    ],
    "group2": [
      0.14
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "beta",
        "a": 1,
        "b": 1
      }
    ],
    "group2": [
      {
        "family": "beta",
        "a": 1,
        "b": 1
      }
    ]
  },
  "characteristic": {
    "kind": "identity"
  },
  "comparison": "proportion_difference",
  "interval": [
    -0.05,
    0.05
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.8
  },
  "target_power": 0.6,
  "method": "bvm",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "bernoulli-setting-1a"
},
  "bernoulli-setting-2a": {
  "model": "bernoulli",
  "design_values": {
    "group1": [
      0.15
    ],
    "group2": [
      0.14
    ]
  },
  "priors": {
    "group1": [
      {
        "family": "beta",
        "a": 3.75,
        "b": 21.25
      }
    ],
    "group2": [
      {
        "family": "beta",
        "a": 3.5,
        "b": 21.5
      }
    ]
  },
  "characteristic": {
    "kind": "identity"
  },
  "comparison": "proportion_difference",
  "interval": [
    -0.05,
    0.05
  ],
  "analysis": {
    "type": "posterior_prob",
    "gamma": 0.8
  },
  "target_power": 0.6,
  "method": "laplace",
  "m": 1024,
  "q": 1.0,
  "seed": 1,
  "label": "bernoulli-setting-2a"
},
};

export const PRESET_NAMES = Object.keys(PRESETS);
