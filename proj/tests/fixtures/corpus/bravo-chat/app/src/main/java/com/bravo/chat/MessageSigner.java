package com.bravo.chat;

import java.security.PrivateKey;
import java.security.Signature;

public class MessageSigner {
    private static final String SIG_ALG = "SHA256withRSA";

    public byte[] sign(PrivateKey key, byte[] msg) throws Exception {
        Signature s = Signature.getInstance(SIG_ALG); //@ kind=SignatureFactory value=SHA256withRSA via=dataflow label=QuantumVulnerable
        s.initSign(key);
        s.update(msg);
        return s.sign();
    }
}
