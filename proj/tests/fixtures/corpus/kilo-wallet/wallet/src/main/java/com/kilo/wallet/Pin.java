package com.kilo.wallet;

import javax.crypto.Mac;

final class Pin {
    private Pin() {
    }

    static Mac legacyMac() throws Exception {
        return Mac.getInstance("HmacSHA1"); //@ kind=MacFactory value=HmacSHA1 via=literal label=QuantumVulnerable
    }
}
