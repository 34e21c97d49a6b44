"""Regenerate the JSON fixtures used by the CLI tests and the README."""
from pathlib import Path

import numpy as np

from channel_order.classical import StochasticChannel, compose
from channel_order.io import dumps, encode_channel, encode_cq, encode_matrix
from channel_order.maps import OperatorMap
from channel_order.states import CqState

HERE = Path(__file__).parent


def write(name, obj):
    (HERE / name).write_text(dumps(obj))


def main():
    bec, bsc = StochasticChannel.bec(0.4), StochasticChannel.bsc(0.2)
    write("bec04.json", encode_channel(bec))
    write("bsc02.json", encode_channel(bsc))
    write("uniform2.json", encode_channel(StochasticChannel.uniform(2, 2)))
    write("identity2.json", encode_channel(StochasticChannel.identity(2)))
    q = StochasticChannel(np.array([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.3, 0.3, 0.4]]))
    write("bec04_then_q.json", encode_channel(compose(q, bec)))
    write("bad_row.json", {"kind": "classical", "p": [[0.5, 0.5], [0.6, 0.3]]})

    write("qubit_identity.json", encode_channel(OperatorMap.identity(2)))
    write("qubit_depolarizing07.json", encode_channel(OperatorMap.depolarizing(2, 0.7)))
    write("qubit_completely_depolarizing.json", encode_channel(OperatorMap.completely_depolarizing(2)))
    write("qubit_transpose.json", encode_channel(OperatorMap.transpose(2)))
    write("qubit_dephasing.json", encode_channel(OperatorMap.dephasing(2)))
    amp = [np.array([[1, 0], [0, np.sqrt(0.7)]]), np.array([[0, np.sqrt(0.3)], [0, 0]])]
    write("qubit_amplitude_damping_kraus.json",
          {"kind": "quantum", "kraus": [encode_matrix(K) for K in amp]})

    kets = [np.array([np.cos(t), np.sin(t)]) for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
    trine = CqState(np.full(3, 1 / 3), tuple(np.outer(k, k) for k in kets))
    write("trine.json", encode_cq(trine))
    plus = np.array([1, 1]) / np.sqrt(2)
    write("zero_plus.json", encode_cq(CqState(np.array([0.5, 0.5]),
                                              (np.diag([1.0, 0.0]), np.outer(plus, plus)))))
    phi = np.eye(2).reshape(-1) / np.sqrt(2)
    write("phi_plus.json", {"kind": "bipartite", "dims": [2, 2], "rho": encode_matrix(np.outer(phi, phi))})
    sigma = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
    write("mixed_product.json", {"kind": "bipartite", "dims": [2, 2],
                                 "rho": encode_matrix(np.kron(np.eye(2) / 2, sigma))})


if __name__ == "__main__":
    main()
