package com.alpha.notes;

import java.security.MessageDigest;
import java.security.NoSuchAlgorithmException;

public class NoteHasher {
    public byte[] fingerprint(byte[] body) throws NoSuchAlgorithmException {
        MessageDigest md = MessageDigest.getInstance("MD5"); //@ kind=DigestFactory value=MD5 via=literal label=QuantumVulnerable
        return md.digest(body);
    }

    public byte[] syncTag(byte[] body) throws NoSuchAlgorithmException {
        // MessageDigest.getInstance("SHA-512") is what the server expects eventually.
        MessageDigest md = MessageDigest.getInstance(HashConfig.SYNC_DIGEST); //@ kind=DigestFactory value=SHA-1 via=dataflow label=QuantumVulnerable
        return md.digest(body);
    }
}
