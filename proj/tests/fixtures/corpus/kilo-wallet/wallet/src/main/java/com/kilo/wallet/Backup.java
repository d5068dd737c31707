package com.kilo.wallet;

import java.security.MessageDigest;

class Backup {
    byte[] id(byte[] seed) throws Exception {
        return MessageDigest.getInstance("SHA-512").digest(seed); //@ kind=DigestFactory value=SHA-512 via=literal label=QuantumSafe
    }
}
